#pragma once

#include "patchflow/biot_savart.hpp"
#include "patchflow/contour.hpp"
#include "patchflow/curve.hpp"
#include "patchflow/diagnostics.hpp"
#include "patchflow/error.hpp"
#include "patchflow/hankel.hpp"
#include "patchflow/io.hpp"
#include "patchflow/kernel.hpp"
#include "patchflow/multiplier.hpp"
#include "patchflow/osgood.hpp"
#include "patchflow/simulate.hpp"
#include "patchflow/vec2.hpp"
