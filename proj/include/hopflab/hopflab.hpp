#pragma once

#include "hopflab/errors.hpp"
#include "hopflab/ambient.hpp"
#include "hopflab/catalog.hpp"
#include "hopflab/engine.hpp"
#include "hopflab/spectral.hpp"
#include "hopflab/suite.hpp"
