#pragma once

#include "symop/algebra.hpp"
#include "symop/central.hpp"
#include "symop/config.hpp"
#include "symop/errors.hpp"
#include "symop/hermitian.hpp"
#include "symop/isometry.hpp"
#include "symop/norms.hpp"
#include "symop/singular.hpp"
#include "symop/superoperator.hpp"
