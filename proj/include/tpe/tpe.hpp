#pragma once

#include "tpe/errors.hpp"
#include "tpe/geometry.hpp"
#include "tpe/norm.hpp"
#include "tpe/operators.hpp"
#include "tpe/problem.hpp"
#include "tpe/assembly.hpp"
#include "tpe/krylov.hpp"
#include "tpe/solvers.hpp"
