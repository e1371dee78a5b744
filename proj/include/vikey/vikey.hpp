#pragma once

// Everything except the HTTP transport (which pulls in cpp-httplib); include
// "vikey/harness/factory.hpp" for that.
#include "vikey/attention_probe.hpp"
#include "vikey/backends/chat.hpp"
#include "vikey/backends/embedder.hpp"
#include "vikey/backends/extractor.hpp"
#include "vikey/backends/mock_decoder.hpp"
#include "vikey/backends/transport.hpp"
#include "vikey/backends/videollm.hpp"
#include "vikey/frame_pipeline.hpp"
#include "vikey/harness/config.hpp"
#include "vikey/harness/pipeline.hpp"
#include "vikey/harness/questions.hpp"
#include "vikey/harness/synth_dataset.hpp"
#include "vikey/image.hpp"
#include "vikey/kfm.hpp"
#include "vikey/marker.hpp"
#include "vikey/position_lab.hpp"
#include "vikey/probe_bench.hpp"
#include "vikey/prompting.hpp"
#include "vikey/synthetic.hpp"
#include "vikey/visual_prompter.hpp"
