#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lesionbox/types.hpp"

namespace lesionbox {

/// Parses a NIfTI-1 single-file (.nii) payload, optionally gzip-compressed
/// (detected by the 0x1f 0x8b prefix). Accepted datatypes: uint8, int16,
/// int32, float32, float64; values are converted to double and
/// scl_slope/scl_inter applied when scl_slope != 0. The affine comes from
/// the sform when sform_code > 0, else the qform when qform_code > 0, else
/// diagonal(spacing). 4-D files with dim[4] = 1 are squeezed to 3-D.
///
/// Voxel indexing downstream is 0-based and x-fastest.
///
/// Throws BadMagic, UnsupportedDatatype, TruncatedData, BadDims.
Volume3 read_nifti(const std::vector<std::uint8_t>& bytes);

/// Serializes a volume as uncompressed NIfTI-1 with float32 data,
/// sform set from the affine and pixdim from the spacing.
/// read_nifti(write_nifti(v)) reproduces dims/spacing/affine exactly and
/// data within float32 rounding.
std::vector<std::uint8_t> write_nifti(const Volume3& vol);

Volume3 read_nifti_file(const std::string& path);
void write_nifti_file(const Volume3& vol, const std::string& path);

} // namespace lesionbox
