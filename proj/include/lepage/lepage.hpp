#pragma once

#include "lepage/atom.hpp"
#include "lepage/charts.hpp"
#include "lepage/contact.hpp"
#include "lepage/dispatch.hpp"
#include "lepage/form.hpp"
#include "lepage/jet_space.hpp"
#include "lepage/lepage_forms.hpp"
#include "lepage/multi_index.hpp"
#include "lepage/parser.hpp"
#include "lepage/printer.hpp"
#include "lepage/relativity.hpp"
#include "lepage/scalar_expr.hpp"
#include "lepage/suites.hpp"
