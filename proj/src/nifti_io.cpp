#include "lesionbox/nifti_io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include <zlib.h>

namespace lesionbox {
namespace {

// NIfTI-1 348-byte header, little-endian on-disk layout.
#pragma pack(push, 1)
struct Nifti1Header {
  std::int32_t sizeof_hdr;    // 0
  char data_type[10];         // 4
  char db_name[18];           // 14
  std::int32_t extents;       // 32
  std::int16_t session_error; // 36
  char regular;               // 38
  char dim_info;              // 39
  std::int16_t dim[8];        // 40
  float intent_p1;            // 56
  float intent_p2;            // 60
  float intent_p3;            // 64
  std::int16_t intent_code;   // 68
  std::int16_t datatype;      // 70
  std::int16_t bitpix;        // 72
  std::int16_t slice_start;   // 74
  float pixdim[8];            // 76
  float vox_offset;           // 108
  float scl_slope;            // 112
  float scl_inter;            // 116
  std::int16_t slice_end;     // 120
  char slice_code;            // 122
  char xyzt_units;            // 123
  float cal_max;              // 124
  float cal_min;              // 128
  float slice_duration;       // 132
  float toffset;              // 136
  std::int32_t glmax;         // 140
  std::int32_t glmin;         // 144
  char descrip[80];           // 148
  char aux_file[24];          // 228
  std::int16_t qform_code;    // 252
  std::int16_t sform_code;    // 254
  float quatern_b;            // 256
  float quatern_c;            // 260
  float quatern_d;            // 264
  float qoffset_x;            // 268
  float qoffset_y;            // 272
  float qoffset_z;            // 276
  float srow_x[4];            // 280
  float srow_y[4];            // 296
  float srow_z[4];            // 312
  char intent_name[16];       // 328
  char magic[4];              // 344
};
#pragma pack(pop)
static_assert(sizeof(Nifti1Header) == 348, "NIfTI-1 header must be 348 bytes");

constexpr std::int16_t kDtUint8 = 2;
constexpr std::int16_t kDtInt16 = 4;
constexpr std::int16_t kDtInt32 = 8;
constexpr std::int16_t kDtFloat32 = 16;
constexpr std::int16_t kDtFloat64 = 64;

std::size_t dtype_size(std::int16_t dt) {
  switch (dt) {
  case kDtUint8:
    return 1;
  case kDtInt16:
    return 2;
  case kDtInt32:
  case kDtFloat32:
    return 4;
  case kDtFloat64:
    return 8;
  default:
    throw UnsupportedDatatype("unsupported NIfTI datatype code " +
                              std::to_string(dt));
  }
}

bool is_gzip(const std::vector<std::uint8_t>& bytes) {
  return bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b;
}

std::vector<std::uint8_t> gunzip(const std::vector<std::uint8_t>& in) {
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 16) != Z_OK)
    throw TruncatedData("gzip: inflateInit failed");
  std::vector<std::uint8_t> out;
  std::uint8_t buf[1 << 16];
  zs.next_in = const_cast<Bytef*>(in.data());
  zs.avail_in = static_cast<uInt>(in.size());
  int rc = Z_OK;
  do {
    zs.next_out = buf;
    zs.avail_out = sizeof(buf);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw TruncatedData("gzip: corrupt or truncated stream");
    }
    out.insert(out.end(), buf, buf + (sizeof(buf) - zs.avail_out));
  } while (rc != Z_STREAM_END && (zs.avail_in > 0 || zs.avail_out == 0));
  inflateEnd(&zs);
  if (rc != Z_STREAM_END)
    throw TruncatedData("gzip: stream ended early");
  return out;
}

Affine4 affine_from_quaternion(const Nifti1Header& h,
                               const std::array<double, 3>& spacing) {
  const double b = h.quatern_b, c = h.quatern_c, d = h.quatern_d;
  double a2 = 1.0 - (b * b + c * c + d * d);
  const double a = a2 > 0.0 ? std::sqrt(a2) : 0.0;
  const double qfac = (h.pixdim[0] < 0.0f) ? -1.0 : 1.0;

  const double r[3][3] = {
      {a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)},
      {2 * (b * c + a * d), a * a + c * c - b * b - d * d, 2 * (c * d - a * b)},
      {2 * (b * d - a * c), 2 * (c * d + a * b), a * a + d * d - b * b - c * c}};

  Affine4 m = identity_affine();
  const double off[3] = {h.qoffset_x, h.qoffset_y, h.qoffset_z};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j)
      m[i][j] = r[i][j] * spacing[j] * (j == 2 ? qfac : 1.0);
    m[i][3] = off[i];
  }
  return m;
}

} // namespace

Volume3 read_nifti(const std::vector<std::uint8_t>& raw) {
  const std::vector<std::uint8_t> plain = is_gzip(raw) ? gunzip(raw) : raw;

  if (plain.size() < sizeof(Nifti1Header))
    throw TruncatedData("payload shorter than the 348-byte NIfTI-1 header");

  Nifti1Header h{};
  std::memcpy(&h, plain.data(), sizeof(h));

  if (h.sizeof_hdr != 348)
    throw BadMagic("header size field is not 348 (not NIfTI-1)");
  if (std::memcmp(h.magic, "n+1\0", 4) != 0)
    throw BadMagic("magic is not \"n+1\" (only single-file NIfTI-1 is "
                   "supported)");

  if (h.dim[0] < 3 || h.dim[0] > 4)
    throw BadDims("dim[0] must be 3 or 4, got " + std::to_string(h.dim[0]));
  if (h.dim[0] == 4 && h.dim[4] > 1)
    throw BadDims("4-D files are only accepted with dim[4] = 1");
  std::array<int, 3> dims;
  for (int i = 0; i < 3; ++i) {
    if (h.dim[i + 1] < 1)
      throw BadDims("dim[" + std::to_string(i + 1) + "] must be >= 1");
    dims[i] = h.dim[i + 1];
  }
  std::array<double, 3> spacing;
  for (int i = 0; i < 3; ++i) {
    const float p = h.pixdim[i + 1];
    if (!(p > 0.0f) || !std::isfinite(p))
      throw BadDims("pixdim[" + std::to_string(i + 1) + "] must be > 0");
    spacing[i] = p;
  }

  const std::size_t elem = dtype_size(h.datatype);
  const std::uint64_t nvox =
      std::uint64_t(dims[0]) * std::uint64_t(dims[1]) * std::uint64_t(dims[2]);
  const double voff_f = h.vox_offset;
  if (!std::isfinite(voff_f) || voff_f < 348.0 ||
      voff_f > double(plain.size()))
    throw TruncatedData("vox_offset outside the payload");
  const std::uint64_t voff = static_cast<std::uint64_t>(voff_f);
  if (plain.size() - voff < nvox * elem)
    throw TruncatedData("data section shorter than dims x dtype size");

  Volume3 vol(dims, spacing);
  if (h.sform_code > 0) {
    Affine4 m = identity_affine();
    for (int j = 0; j < 4; ++j) {
      m[0][j] = h.srow_x[j];
      m[1][j] = h.srow_y[j];
      m[2][j] = h.srow_z[j];
    }
    vol.affine = m;
  } else if (h.qform_code > 0) {
    vol.affine = affine_from_quaternion(h, spacing);
  } else {
    vol.affine = diagonal_affine(spacing);
  }
  vol.validate_shape();

  const std::uint8_t* src = plain.data() + voff;
  for (std::uint64_t i = 0; i < nvox; ++i) {
    double v = 0.0;
    switch (h.datatype) {
    case kDtUint8:
      v = src[i];
      break;
    case kDtInt16: {
      std::int16_t t;
      std::memcpy(&t, src + i * 2, 2);
      v = t;
      break;
    }
    case kDtInt32: {
      std::int32_t t;
      std::memcpy(&t, src + i * 4, 4);
      v = t;
      break;
    }
    case kDtFloat32: {
      float t;
      std::memcpy(&t, src + i * 4, 4);
      v = t;
      break;
    }
    case kDtFloat64: {
      double t;
      std::memcpy(&t, src + i * 8, 8);
      v = t;
      break;
    }
    default:
      break;
    }
    if (h.scl_slope != 0.0f)
      v = double(h.scl_slope) * v + double(h.scl_inter);
    vol.data[i] = v;
  }
  return vol;
}

std::vector<std::uint8_t> write_nifti(const Volume3& vol) {
  vol.validate_shape();
  if (vol.data.size() != vol.voxel_count())
    throw BadDims("data length does not match dims");

  Nifti1Header h{};
  h.sizeof_hdr = 348;
  h.regular = 'r';
  h.dim[0] = 3;
  for (int i = 0; i < 3; ++i)
    h.dim[i + 1] = static_cast<std::int16_t>(vol.dims[i]);
  for (int i = 4; i < 8; ++i)
    h.dim[i] = 1;
  h.datatype = kDtFloat32;
  h.bitpix = 32;
  h.pixdim[0] = 1.0f;
  for (int i = 0; i < 3; ++i)
    h.pixdim[i + 1] = static_cast<float>(vol.spacing[i]);
  h.vox_offset = 352.0f;
  h.scl_slope = 1.0f;
  h.scl_inter = 0.0f;
  h.xyzt_units = 2; // NIFTI_UNITS_MM
  h.sform_code = 1; // NIFTI_XFORM_SCANNER_ANAT
  h.qform_code = 0;
  for (int j = 0; j < 4; ++j) {
    h.srow_x[j] = static_cast<float>(vol.affine[0][j]);
    h.srow_y[j] = static_cast<float>(vol.affine[1][j]);
    h.srow_z[j] = static_cast<float>(vol.affine[2][j]);
  }
  std::memcpy(h.magic, "n+1\0", 4);

  std::vector<std::uint8_t> out(352 + vol.data.size() * 4, 0);
  std::memcpy(out.data(), &h, sizeof(h));
  // bytes 348..351: extension flag, all zero (no extensions)
  for (std::size_t i = 0; i < vol.data.size(); ++i) {
    const float f = static_cast<float>(vol.data[i]);
    std::memcpy(out.data() + 352 + i * 4, &f, 4);
  }
  return out;
}

Volume3 read_nifti_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw TruncatedData("cannot open file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return read_nifti(bytes);
}

void write_nifti_file(const Volume3& vol, const std::string& path) {
  const auto bytes = write_nifti(vol);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw TruncatedData("cannot open file for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out)
    throw TruncatedData("write failed: " + path);
}

} // namespace lesionbox
