#pragma once

// Single-threaded reference versions of the OpenMP kernels. They are written
// pixel-by-pixel on top of the scalar APIs and exist so tests and the benchmark
// can check the parallel kernels against them.

#include "vinesar/optical.hpp"
#include "vinesar/parcels.hpp"
#include "vinesar/raster.hpp"
#include "vinesar/sar.hpp"
#include "vinesar/synth.hpp"

namespace vinesar::serial {

Raster resample(const Raster& raster, const GridSpec& target, ResampleMethod method);

sar::C2Raster multilook(const sar::C2Raster& c2, int win_x, int win_y);
sar::C2Raster boxcar_filter(const sar::C2Raster& c2, int win);
sar::IndexResult dprvi_raster(const sar::C2Raster& c2);

optical::IndexResult ndvi(const optical::BandSet& bands);
optical::IndexResult svhi(const optical::BandSet& bands);

/// Per-pixel even-odd point-in-polygon test over all rings.
parcels::ParcelMask rasterize(const parcels::Parcel& parcel, const GridSpec& spec);
parcels::ParcelMask erode(const parcels::ParcelMask& mask, int pixels);

synth::SceneResult generate_scene(const synth::SceneSpec& scene);

}  // namespace vinesar::serial
