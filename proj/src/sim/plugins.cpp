#include "triage/sim/plugins.hpp"

#include <bit>
#include <stdexcept>

#include <boost/random/uniform_real_distribution.hpp>

#include "triage/sim/rng.hpp"
#include "triage/vitals/vitals.hpp"

namespace triage::sim {

namespace {

namespace orch = orchestrator;
namespace field = orchestrator::field;
using vitals::RateEstimate;

std::uint64_t assessment_seed(const Scenario& s, StreamTag tag, std::uint64_t plugin_index,
                              const orch::AssessmentRequest& req) {
  return derive_seed(s.seed, {tag, plugin_index, static_cast<std::uint64_t>(req.casualty_id),
                              std::bit_cast<std::uint64_t>(req.trigger_time)});
}

vitals::SynthParams synth_params(const Scenario& s, const CasualtyTruth& c, vitals::Modality m,
                                 std::uint64_t seed) {
  vitals::SynthParams p;
  p.modality = m;
  p.hr_bpm = c.manikin ? 60.0 : c.hr_bpm;
  p.cardiac_gain = c.manikin ? 0.0 : 1.0;
  p.rr_bpm = c.rr_bpm;
  p.snr_db = s.vitals.snr_db;
  p.seed = seed;
  if (m == vitals::Modality::Rgb) p.duration = 30.0;
  if (m == vitals::Modality::Thermal) {
    p.thermal_drift_per_s = s.vitals.thermal_drift_per_s;
    p.episodes.rate_per_min = s.vitals.motion_episodes_per_min;
  }
  return p;
}

const CasualtyTruth& require_subject(const SubjectLookup& lookup, const orch::AssessmentRequest& req) {
  const CasualtyTruth* c = lookup(req);
  if (c == nullptr) throw std::runtime_error("no casualty in view");
  return *c;
}

// Runs an estimator, turning a vitals failure into an invalid estimate.
template <typename F>
RateEstimate guarded(const char* source, F&& f) {
  try {
    return f();
  } catch (const vitals::VitalsError&) {
    return RateEstimate::invalid(source);
  }
}

using Body = std::function<orch::FieldValues(const CasualtyTruth&, std::uint64_t seed)>;

orch::PluginConfig make(const Scenario& s, SubjectLookup lookup, const std::string& name, std::uint64_t index,
                        StreamTag tag, std::vector<std::string> produces, Body body) {
  const PluginSpec& spec = s.plugins.at(name);
  orch::PluginConfig cfg;
  cfg.descriptor = {name, spec.enabled, std::move(produces), spec.timeout};
  const double elapsed = spec.elapsed;
  cfg.run = [&s, lookup = std::move(lookup), body = std::move(body), index, tag,
             elapsed](const orch::AssessmentRequest& req) {
    const CasualtyTruth& c = require_subject(lookup, req);
    return orch::PluginOutput{body(c, assessment_seed(s, tag, index, req)), elapsed};
  };
  return cfg;
}

orch::FieldValues classify(const CasualtyTruth& c, const std::vector<std::string>& fields, double accuracy,
                           std::uint64_t seed) {
  Rng rng(seed);
  boost::random::uniform_real_distribution<double> u(0.0, 1.0);
  orch::FieldValues out;
  for (const auto& f : fields) {
    const bool truth = c.labels.at(f);
    out[f] = u(rng) < accuracy ? truth : !truth;
  }
  return out;
}

}  // namespace

std::vector<orch::PluginConfig> make_sim_plugins(const Scenario& s, SubjectLookup subject) {
  using vitals::Modality;
  std::vector<orch::PluginConfig> out;

  out.push_back(make(s, subject, orch::plugin::kLwir, 0, kVitalsStream, {field::kRespiration},
                     [&s](const CasualtyTruth& c, std::uint64_t seed) {
                       const auto trace = vitals::synth_thermal(synth_params(s, c, Modality::Thermal, seed));
                       return orch::FieldValues{{field::kRespiration, guarded("lwir", [&] {
                                                   return vitals::estimate_rr_thermal(trace).averaged;
                                                 })}};
                     }));

  out.push_back(make(s, subject, orch::plugin::kMmwave, 1, kVitalsStream, {field::kHeartRate, field::kRespiration},
                     [&s](const CasualtyTruth& c, std::uint64_t seed) {
                       const auto x = vitals::synth_mmwave(synth_params(s, c, Modality::Mmwave, seed));
                       return orch::FieldValues{
                           {field::kHeartRate,
                            guarded("mmwave", [&] { return vitals::estimate_rate_mmwave(x, vitals::kCardiacBand); })},
                           {field::kRespiration, guarded("mmwave", [&] {
                              return vitals::estimate_rate_mmwave(x, vitals::kRespiratoryBand);
                            })}};
                     }));

  out.push_back(make(s, subject, orch::plugin::kPcr, 2, kVitalsStream, {field::kRespiration},
                     [&s](const CasualtyTruth& c, std::uint64_t seed) {
                       const auto x = vitals::synth_pcr(synth_params(s, c, Modality::Pcr, seed));
                       return orch::FieldValues{
                           {field::kRespiration, guarded("pcr", [&] { return vitals::estimate_rr_pcr(x); })}};
                     }));

  // MTTS-CAN stand-in: CHROM heart rate and green-channel respiration from
  // one RGB trace.
  out.push_back(make(s, subject, orch::plugin::kMtts, 3, kVitalsStream, {field::kHeartRate, field::kRespiration},
                     [&s](const CasualtyTruth& c, std::uint64_t seed) {
                       const auto trace = vitals::synth_rgb(synth_params(s, c, Modality::Rgb, seed));
                       RateEstimate hr = guarded("mtts", [&] { return vitals::estimate_hr_rppg(trace); });
                       RateEstimate rr = guarded("mtts", [&] {
                         vitals::SampleSeries green{trace.timestamps, trace.rgb.col(1), 0.0};
                         return vitals::estimate_rate_mmwave(green, vitals::kRespiratoryBand);
                       });
                       hr.source = rr.source = "mtts";
                       return orch::FieldValues{{field::kHeartRate, hr}, {field::kRespiration, rr}};
                     }));

  const double p = s.classifier_accuracy;
  const std::vector<std::string> trauma{field::kTraumaHead, field::kTraumaTorso, field::kTraumaUpper,
                                        field::kTraumaLower, field::kSevereHemorrhage};
  auto trauma_fields = trauma;
  trauma_fields.push_back(field::kDescription);
  out.push_back(make(s, subject, orch::plugin::kTrauma, 4, kClassifierStream, trauma_fields,
                     [trauma, p](const CasualtyTruth& c, std::uint64_t seed) {
                       auto values = classify(c, trauma, p, seed);
                       std::string seen;
                       for (const char* region : {"head", "torso", "upper_extremity", "lower_extremity"}) {
                         if (std::get<bool>(values.at(std::string("trauma.") + region))) {
                           seen += (seen.empty() ? "" : ", ") + std::string(region);
                         }
                       }
                       values[field::kDescription] = seen.empty() ? "no visible trauma" : "visible trauma: " + seen;
                       return values;
                     }));

  const std::vector<std::string> distress{field::kRespiratoryDistress};
  out.push_back(make(s, subject, orch::plugin::kDistress, 5, kClassifierStream, distress,
                     [distress, p](const CasualtyTruth& c, std::uint64_t seed) {
                       return classify(c, distress, p, seed);
                     }));

  const std::vector<std::string> alert{field::kAlertOcular, field::kAlertVerbal, field::kAlertMotor};
  out.push_back(make(s, subject, orch::plugin::kAlertness, 6, kClassifierStream, alert,
                     [alert, p](const CasualtyTruth& c, std::uint64_t seed) { return classify(c, alert, p, seed); }));
  return out;
}

}  // namespace triage::sim
