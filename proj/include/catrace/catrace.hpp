#pragma once

#include "catrace/core.hpp"
#include "catrace/subshift.hpp"
#include "catrace/trace.hpp"
#include "catrace/freeze.hpp"
#include "catrace/semifinite.hpp"
#include "catrace/compile.hpp"
#include "catrace/gadget.hpp"
#include "catrace/verify.hpp"
#include "catrace/fixtures.hpp"
#include "catrace/io.hpp"
