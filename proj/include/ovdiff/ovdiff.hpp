#pragma once

// Umbrella header. embedding_http.hpp is not included here; it pulls in the
// HTTP client and is only needed when talking to a remote embedding service.

#include "ovdiff/alignment.hpp"
#include "ovdiff/alignment_io.hpp"
#include "ovdiff/changelog.hpp"
#include "ovdiff/crossref.hpp"
#include "ovdiff/engine.hpp"
#include "ovdiff/entities.hpp"
#include "ovdiff/error.hpp"
#include "ovdiff/eval.hpp"
#include "ovdiff/matchers.hpp"
#include "ovdiff/rdf.hpp"
#include "ovdiff/testbed.hpp"
#include "ovdiff/turtle.hpp"
