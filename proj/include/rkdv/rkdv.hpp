#pragma once

#include "rkdv/analysis.hpp"
#include "rkdv/burgers.hpp"
#include "rkdv/config.hpp"
#include "rkdv/datum.hpp"
#include "rkdv/entropy.hpp"
#include "rkdv/fft.hpp"
#include "rkdv/grid.hpp"
#include "rkdv/harness.hpp"
#include "rkdv/ledger.hpp"
#include "rkdv/models.hpp"
#include "rkdv/report_io.hpp"
#include "rkdv/run_store.hpp"
#include "rkdv/snapshot.hpp"
#include "rkdv/timestepper.hpp"
