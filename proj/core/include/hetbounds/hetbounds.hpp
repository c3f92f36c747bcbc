#pragma once

#include "hetbounds/bounds.hpp"
#include "hetbounds/dataset.hpp"
#include "hetbounds/error.hpp"
#include "hetbounds/estimator.hpp"
#include "hetbounds/interval.hpp"
#include "hetbounds/polytope.hpp"
#include "hetbounds/rho_matrix.hpp"
