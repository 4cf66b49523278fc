#pragma once

#include "sumrule/errors.hpp"
#include "sumrule/rational.hpp"
#include "sumrule/exactalg.hpp"
#include "sumrule/grid.hpp"
#include "sumrule/potential.hpp"
#include "sumrule/hydrogen.hpp"
#include "sumrule/ladder.hpp"
#include "sumrule/potentials.hpp"
#include "sumrule/sumrules.hpp"
#include "sumrule/oracle.hpp"
#include "sumrule/verify.hpp"
