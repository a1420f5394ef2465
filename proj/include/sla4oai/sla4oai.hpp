#pragma once

// Umbrella header: the whole analyzer library.

#include "sla4oai/analysis.hpp"
#include "sla4oai/cli.hpp"
#include "sla4oai/diagnostics.hpp"
#include "sla4oai/doctree.hpp"
#include "sla4oai/document.hpp"
#include "sla4oai/glob.hpp"
#include "sla4oai/io.hpp"
#include "sla4oai/model.hpp"
#include "sla4oai/rational.hpp"
#include "sla4oai/service.hpp"
#include "sla4oai/simulator.hpp"
#include "sla4oai/timeunit.hpp"
