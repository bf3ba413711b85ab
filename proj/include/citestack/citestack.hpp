#pragma once

// Everything except the HTTP glue (server.hpp), which pulls in httplib.

#include "citestack/api.hpp"
#include "citestack/collab.hpp"
#include "citestack/corpus.hpp"
#include "citestack/error.hpp"
#include "citestack/evaluation.hpp"
#include "citestack/explain.hpp"
#include "citestack/journals.hpp"
#include "citestack/pipeline.hpp"
#include "citestack/random.hpp"
#include "citestack/report.hpp"
#include "citestack/scoring.hpp"
#include "citestack/static_detect.hpp"
#include "citestack/stats.hpp"
#include "citestack/synthgen.hpp"
#include "citestack/temporal_detect.hpp"
#include "citestack/tensor.hpp"
#include "citestack/text.hpp"
