#pragma once

#include "pshlab/catalog.hpp"
#include "pshlab/comparison.hpp"
#include "pshlab/core.hpp"
#include "pshlab/grid.hpp"
#include "pshlab/hessian.hpp"
#include "pshlab/io.hpp"
#include "pshlab/lab.hpp"
#include "pshlab/measure.hpp"
#include "pshlab/quadrature.hpp"
#include "pshlab/radial.hpp"

namespace pshlab {

using GridDomainD = GridDomain<double>;
using GridFunctionD = GridFunction<double>;
using RegionMaskD = RegionMask<double>;
using PshSpecD = PshSpec<double>;
using ChiWeightD = ChiWeight<double>;
using SequenceSchemeD = SequenceScheme<double>;
using ComplexHessianFieldD = ComplexHessianField<double>;
using MeasureFieldD = MeasureField<double>;
using CurrentSpecD = CurrentSpec<double>;
using ScanReportD = ScanReport<double>;

}  // namespace pshlab
