#pragma once

#include "fixlab/errors.hpp"
#include "fixlab/expr.hpp"
#include "fixlab/space.hpp"
#include "fixlab/verdict.hpp"
#include "fixlab/phi.hpp"
#include "fixlab/gauge.hpp"
#include "fixlab/picard.hpp"
#include "fixlab/seqlab.hpp"
#include "fixlab/config.hpp"
#include "fixlab/report.hpp"
#include "fixlab/cli.hpp"
