#pragma once

#include "slicekit/error.hpp"
#include "slicekit/lexer.hpp"
#include "slicekit/syntax_tree.hpp"
#include "slicekit/parse.hpp"
#include "slicekit/source_unit.hpp"
#include "slicekit/dfg.hpp"
#include "slicekit/tree_edit.hpp"
#include "slicekit/tsed.hpp"
#include "slicekit/slice.hpp"
#include "slicekit/oracle.hpp"
#include "slicekit/rng.hpp"
#include "slicekit/corpusgen.hpp"
#include "slicekit/tokenizer.hpp"
#include "slicekit/scorer.hpp"
#include "slicekit/protocol.hpp"
#include "slicekit/decode.hpp"
#include "slicekit/dataset.hpp"
#include "slicekit/eval.hpp"
#include "slicekit/pipeline.hpp"
#include "slicekit/fixtures.hpp"
