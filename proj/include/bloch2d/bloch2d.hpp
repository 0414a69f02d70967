#pragma once

#include "bloch2d/geometry.hpp"
#include "bloch2d/lattice.hpp"
#include "bloch2d/band.hpp"
#include "bloch2d/semiclassics.hpp"
#include "bloch2d/packet.hpp"
#include "bloch2d/evolve.hpp"
#include "bloch2d/spectral.hpp"
#include "bloch2d/io.hpp"
#include "bloch2d/config.hpp"
#include "bloch2d/svg.hpp"
