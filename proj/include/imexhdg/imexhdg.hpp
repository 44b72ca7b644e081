#pragma once

#include "imexhdg/basis.hpp"
#include "imexhdg/cases.hpp"
#include "imexhdg/config.hpp"
#include "imexhdg/dg_explicit.hpp"
#include "imexhdg/driver.hpp"
#include "imexhdg/errors.hpp"
#include "imexhdg/fields.hpp"
#include "imexhdg/hdg_implicit.hpp"
#include "imexhdg/imex.hpp"
#include "imexhdg/mesh.hpp"
#include "imexhdg/shallow_water.hpp"
#include "imexhdg/swe_model.hpp"
#include "imexhdg/vtk.hpp"
