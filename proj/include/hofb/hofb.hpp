#pragma once

// Umbrella header for the Hofstadter-butterfly engine.

#include "hofb/builtin.hpp"
#include "hofb/errors.hpp"
#include "hofb/flake.hpp"
#include "hofb/geometry.hpp"
#include "hofb/kpm.hpp"
#include "hofb/lattice.hpp"
#include "hofb/oracle.hpp"
#include "hofb/peierls.hpp"
#include "hofb/plaquette.hpp"
#include "hofb/sparse.hpp"
#include "hofb/sweep.hpp"
#include "hofb/version.hpp"
#include "hofb/xyz.hpp"
