#pragma once

// Multi-source property matching: corpus ingestion, word-embedding features,
// a learned pair classifier, unsupervised baselines, and the evaluation
// regimes around them.

#include "propmatch/baselines.hpp"
#include "propmatch/classifier.hpp"
#include "propmatch/corpus.hpp"
#include "propmatch/embedding.hpp"
#include "propmatch/evaluation.hpp"
#include "propmatch/features.hpp"
#include "propmatch/matcher.hpp"
#include "propmatch/string_similarity.hpp"
