#include <vector>

#include "weldgeom/error.hpp"
#include "weldgeom/linmodel.hpp"

namespace weldgeom {
namespace {

LinearModel published(FeatureScheme scheme, Response response, double intercept,
                      std::vector<double> coefficients) {
  return {scheme, response, intercept, std::move(coefficients),
          Provenance::Published};
}

std::vector<LinearModel> build() {
  using enum FeatureScheme;
  using enum Response;
  return {
      // Linear: t i v s
      published(Linear, Width, 5.70231832,
                {-0.51518823, 1.28819674, -1.20653336, -0.81732366}),
      published(Linear, Penetration, 1.09927399,
                {0.13730178, 0.95692073, 0.78884736, -0.80878598}),
      published(Linear, Throat, 4.57137386,
                {-0.75246881, 1.46922465, 0.69473209, -1.49694922}),
      published(Linear, Leg, 4.48675941,
                {0.11731523, 1.23693704, 0.27055171, -1.0234384}),

      // Interactive: t i v s ti tv ts iv is vs
      published(Interactive, Width, 4.61893649,
                {0.651438, 9.478483, -1.06198, -3.518106, 0.203403, -0.77942,
                 -0.79978, -8.114237, -5.8241332, 9.415024}),
      published(Interactive, Penetration, 1.04575802,
                {0.308362, 1.717664, 1.260269, -2.082993, -0.13729, 0.147812,
                 -0.37407, -2.024897, 1.227235, 1.06853}),
      published(Interactive, Throat, 5.96133052,
                {0.316904, 1.370493, -0.96561, -8.58598, -1.73132, -0.00281,
                 0.070876, -2.55739, 4.62787, 6.142991}),
      published(Interactive, Leg, 3.23814441,
                {-0.0967, 1.97785, 2.338584, 3.2733419, -0.44175, 0.593751,
                 -0.14184, 0.1332088, -1.080466, -4.98726}),

      // Full: t i v s t² ti tv ts i² iv is v² vs s²
      published(Full, Width, 4.4932921,
                {0.4135383, 9.08740111, -0.56480994, -1.94290995, 0.49076616,
                 -0.42880857, -0.68836508, -0.6462735, 0.09007508, -8.07186027,
                 -4.6289759, -0.52120768, 9.35456595, -2.21299079}),
      published(Full, Penetration, 1.04560761,
                {0.57014597, 2.50137859, 1.466591, -2.2697287, -0.76389532,
                 0.79393758, 0.43326392, -0.88051647, -1.19742114, -2.61559246,
                 2.19579487, -0.28596557, 1.60877736, -0.53011746}),
      published(Full, Throat, 6.09520908,
                {0.42603142, 2.30330926, -1.32239399, -10.01496405, -0.54508665,
                 -0.86131793, 0.0634657, -0.20033023, -1.0122627, -2.84637547,
                 4.417332977, 0.2734138, 6.54473054, 1.34339086}),
      published(Full, Leg, 3.2290114,
                {0.13111397, 2.32618553, 2.59597395, 2.98450153, -0.49374791,
                 0.08748134, 0.72048353, -0.42511743, -0.43227202, -0.15924306,
                 -0.9190801, -0.27437132, -4.74497102, 0.12879011}),
  };
}

}  // namespace

const std::vector<LinearModel>& load_published_models() {
  static const std::vector<LinearModel> models = build();
  return models;
}

const LinearModel& published_model(FeatureScheme scheme, Response response) {
  for (const auto& m : load_published_models()) {
    if (m.scheme == scheme && m.response == response) return m;
  }
  throw Error("no published model for this scheme/response");
}

}  // namespace weldgeom
