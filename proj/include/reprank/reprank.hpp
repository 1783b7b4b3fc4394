#pragma once

#include "reprank/engines.hpp"
#include "reprank/errors.hpp"
#include "reprank/ground_truth.hpp"
#include "reprank/ingestion.hpp"
#include "reprank/metrics.hpp"
#include "reprank/rating_table.hpp"
#include "reprank/rng.hpp"
#include "reprank/synthetic.hpp"
