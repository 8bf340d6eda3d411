#pragma once

#include "multindex/connectivity.hpp"
#include "multindex/csv.hpp"
#include "multindex/dad_solver.hpp"
#include "multindex/dataset.hpp"
#include "multindex/demand.hpp"
#include "multindex/errors.hpp"
#include "multindex/linear_solver.hpp"
#include "multindex/loglinear.hpp"
#include "multindex/matrix.hpp"
#include "multindex/method.hpp"
#include "multindex/neary_solver.hpp"
#include "multindex/oracle.hpp"
#include "multindex/residual.hpp"
#include "multindex/solution.hpp"
#include "multindex/solve.hpp"
