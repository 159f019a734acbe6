#pragma once

// Umbrella header.

#include "tsis/amplify.hpp"
#include "tsis/catalog.hpp"
#include "tsis/corpus.hpp"
#include "tsis/error.hpp"
#include "tsis/evalharness.hpp"
#include "tsis/families.hpp"
#include "tsis/instruction_set.hpp"
#include "tsis/report.hpp"
#include "tsis/synth.hpp"
#include "tsis/typesig.hpp"
