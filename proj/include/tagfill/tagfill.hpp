#pragma once

#include "tagfill/agreement.hpp"
#include "tagfill/checklist.hpp"
#include "tagfill/corpus.hpp"
#include "tagfill/edit_script.hpp"
#include "tagfill/error.hpp"
#include "tagfill/evaluation.hpp"
#include "tagfill/generator.hpp"
#include "tagfill/io.hpp"
#include "tagfill/lexicon.hpp"
#include "tagfill/pipeline.hpp"
#include "tagfill/records.hpp"
#include "tagfill/tagger.hpp"
#include "tagfill/text.hpp"
#include "tagfill/toxicity.hpp"

namespace tagfill {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace tagfill
