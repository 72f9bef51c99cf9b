#pragma once

#include "wigner/error.hpp"
#include "wigner/grid.hpp"
#include "wigner/transforms.hpp"
#include "wigner/moyal.hpp"
#include "wigner/dynamics.hpp"
#include "wigner/husimi.hpp"
#include "wigner/negativity.hpp"
#include "wigner/io.hpp"
