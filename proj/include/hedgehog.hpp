#pragma once

#include "hedgehog/potential.hpp"
#include "hedgehog/qtensor.hpp"
#include "hedgehog/cauchy.hpp"
#include "hedgehog/grid.hpp"
#include "hedgehog/integrator.hpp"
#include "hedgehog/profile.hpp"
#include "hedgehog/minimize.hpp"
#include "hedgehog/shooting.hpp"
#include "hedgehog/parallel.hpp"
#include "hedgehog/diagnostics.hpp"
#include "hedgehog/io.hpp"
