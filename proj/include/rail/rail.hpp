#pragma once

#include "rail/channel.hpp"
#include "rail/codes.hpp"
#include "rail/correlate.hpp"
#include "rail/error.hpp"
#include "rail/geometry.hpp"
#include "rail/harness.hpp"
#include "rail/locate.hpp"
#include "rail/receiver.hpp"
#include "rail/scenario_io.hpp"
#include "rail/seeding.hpp"
#include "rail/selftest.hpp"
#include "rail/waveform.hpp"
