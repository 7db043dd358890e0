#pragma once

#include "bicmb/bit_metrics.hpp"
#include "bicmb/codebook.hpp"
#include "bicmb/codebook_io.hpp"
#include "bicmb/constellation.hpp"
#include "bicmb/convcode.hpp"
#include "bicmb/errors.hpp"
#include "bicmb/interleaver.hpp"
#include "bicmb/linalg.hpp"
#include "bicmb/lloyd.hpp"
#include "bicmb/modem.hpp"
#include "bicmb/quantizer.hpp"
#include "bicmb/receivers.hpp"
#include "bicmb/rng.hpp"
#include "bicmb/sim.hpp"
#include "bicmb/version.hpp"
