/// @file  xbdd.hpp
/// @brief Everything: the diagram engine, model encodings and checker tasks

#pragma once

#include "apply.hpp"
#include "bool_expr.hpp"
#include "builder.hpp"
#include "checker.hpp"
#include "diagram.hpp"
#include "error.hpp"
#include "extmem.hpp"
#include "inspect.hpp"
#include "models.hpp"
#include "ptr.hpp"
#include "quantify.hpp"
#include "reduce.hpp"
#include "serialize.hpp"
#include "sloan.hpp"
#include "substitution.hpp"
#include "symbolic.hpp"
