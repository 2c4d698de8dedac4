#pragma once

#include "orlicz/bbm.hpp"
#include "orlicz/config.hpp"
#include "orlicz/error.hpp"
#include "orlicz/grid_function.hpp"
#include "orlicz/limit_density.hpp"
#include "orlicz/modular.hpp"
#include "orlicz/orlicz_function.hpp"
#include "orlicz/parallel.hpp"
#include "orlicz/primitives.hpp"
#include "orlicz/properties.hpp"
#include "orlicz/quadrature.hpp"
#include "orlicz/solver.hpp"
#include "orlicz/transforms.hpp"
