#pragma once

#include "eolcycle/config.hpp"
#include "eolcycle/eol.hpp"
#include "eolcycle/error.hpp"
#include "eolcycle/format.hpp"
#include "eolcycle/graph.hpp"
#include "eolcycle/query.hpp"
#include "eolcycle/query_exec.hpp"
#include "eolcycle/reasoner.hpp"
#include "eolcycle/rules.hpp"
#include "eolcycle/schema.hpp"
#include "eolcycle/term.hpp"
#include "eolcycle/turtle.hpp"
#include "eolcycle/validate.hpp"
