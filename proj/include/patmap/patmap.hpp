#pragma once

// Umbrella header.

#include "patmap/cluster.hpp"
#include "patmap/common.hpp"
#include "patmap/diversity.hpp"
#include "patmap/fileio.hpp"
#include "patmap/portfolio.hpp"
#include "patmap/record.hpp"
#include "patmap/similarity.hpp"
#include "patmap/stats.hpp"
#include "patmap/two_mode.hpp"
