#pragma once

// Everything in one include.

#include "circenv/assoc.hpp"
#include "circenv/envelope.hpp"
#include "circenv/error.hpp"
#include "circenv/expr.hpp"
#include "circenv/fixtures.hpp"
#include "circenv/frontal.hpp"
#include "circenv/functions.hpp"
#include "circenv/io.hpp"
#include "circenv/jet.hpp"
#include "circenv/mohr.hpp"
#include "circenv/parser.hpp"
#include "circenv/report.hpp"
#include "circenv/svg.hpp"
#include "circenv/vec2.hpp"
#include "circenv/verify.hpp"
