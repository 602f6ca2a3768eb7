#pragma once

#include "qmi/error.hpp"
#include "qmi/qmat.hpp"
#include "qmi/entropy.hpp"
#include "qmi/thales.hpp"
#include "qmi/ensembles.hpp"
#include "qmi/nelder_mead.hpp"
#include "qmi/squashed.hpp"
#include "qmi/verify.hpp"
#include "qmi/state_io.hpp"
#include "qmi/named_states.hpp"
#include "qmi/report.hpp"
