#pragma once

#include "nlwave/analysis.hpp"
#include "nlwave/assembly.hpp"
#include "nlwave/basis.hpp"
#include "nlwave/collocation.hpp"
#include "nlwave/errors.hpp"
#include "nlwave/evolve.hpp"
#include "nlwave/forcing.hpp"
#include "nlwave/kernel.hpp"
#include "nlwave/linalg.hpp"
