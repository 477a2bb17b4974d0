#pragma once

#include "blocks.hpp"
#include "classify.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "stft.hpp"
#include "weights.hpp"
#include "wilson.hpp"
#include "zak.hpp"
#include "verify.hpp"
