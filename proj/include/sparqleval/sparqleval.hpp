#pragma once
// Convenience umbrella for the whole library.

#include "sparqleval/builtin.hpp"
#include "sparqleval/core.hpp"
#include "sparqleval/judge.hpp"
#include "sparqleval/kb/answer_metrics.hpp"
#include "sparqleval/kb/endpoint.hpp"
#include "sparqleval/kb/oracle.hpp"
#include "sparqleval/kb/results.hpp"
#include "sparqleval/kb/term.hpp"
#include "sparqleval/metrics/codebleu.hpp"
#include "sparqleval/metrics/lexical.hpp"
#include "sparqleval/metrics/prf.hpp"
#include "sparqleval/metrics/ranking.hpp"
#include "sparqleval/report/analysis.hpp"
#include "sparqleval/report/dataset.hpp"
#include "sparqleval/report/emit.hpp"
#include "sparqleval/sparql/ast.hpp"
#include "sparqleval/sparql/normalize.hpp"
#include "sparqleval/sparql/parser.hpp"
#include "sparqleval/sparql/serialize.hpp"
#include "sparqleval/sparql/token.hpp"
