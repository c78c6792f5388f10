#include "xsda/raster/image.hpp"

#include <cmath>

namespace xsda::raster {

const char* to_string(DomainTag tag) {
  switch (tag) {
    case DomainTag::L8_30M: return "L8_30M";
    case DomainTag::LU_333M: return "LU_333M";
    case DomainTag::PV_333M: return "PV_333M";
    case DomainTag::PV_ADAPTED_333M: return "PV_ADAPTED_333M";
  }
  return "?";
}

DomainTag domain_tag_from_string(const std::string& s) {
  if (s == "L8_30M") return DomainTag::L8_30M;
  if (s == "LU_333M") return DomainTag::LU_333M;
  if (s == "PV_333M") return DomainTag::PV_333M;
  if (s == "PV_ADAPTED_333M") return DomainTag::PV_ADAPTED_333M;
  throw std::runtime_error("unknown domain tag: " + s);
}

void MultispectralImage::check() const {
  for (const auto& b : bands)
    if (!b.same_shape(bands[0])) throw std::runtime_error("bands differ in shape");
  if (validity.h != bands[0].h || validity.w != bands[0].w)
    throw std::runtime_error("validity mask shape mismatch");
  if (domain_resolution_m(domain_tag) != resolution_m)
    throw std::runtime_error(std::string("domain tag ") + to_string(domain_tag) +
                             " inconsistent with resolution " + std::to_string(resolution_m));
  for (const auto& b : bands)
    for (float v : b.v)
      if (!std::isfinite(v)) throw std::runtime_error("non-finite value inside band plane");
}

}  // namespace xsda::raster
