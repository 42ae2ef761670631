#pragma once

#include "dvrforge/error.hpp"
#include "dvrforge/format.hpp"
#include "dvrforge/linalg.hpp"
#include "dvrforge/parallel.hpp"
#include "dvrforge/segment.hpp"
#include "dvrforge/polyfam.hpp"
#include "dvrforge/quadrature.hpp"
#include "dvrforge/dvr_core.hpp"
#include "dvrforge/matrix_io.hpp"
#include "dvrforge/fixed_point.hpp"
#include "dvrforge/oracle_emulator.hpp"
#include "dvrforge/cost_models.hpp"
#include "dvrforge/unitary_synthesis.hpp"
