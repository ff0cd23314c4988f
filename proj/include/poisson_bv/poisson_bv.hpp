#pragma once

#include "boundary.hpp"
#include "boundary_function.hpp"
#include "error.hpp"
#include "fuchsian.hpp"
#include "fuchsian_system.hpp"
#include "models.hpp"
#include "polynomial.hpp"
#include "quadrature.hpp"
#include "rootdata.hpp"
#include "transforms.hpp"
#include "types.hpp"
