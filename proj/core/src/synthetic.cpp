#include "narr/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "narr/tokenize.hpp"

namespace narr {

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }

 private:
  std::mt19937_64 gen_;
};

constexpr std::array kNames = {"mara", "tomas", "ilse", "odo", "renn", "bea", "lio", "sefa"};
constexpr std::array kPlaces = {"mill", "harbor", "forest", "bridge", "tower", "market", "orchard", "chapel"};
constexpr std::array kThreats = {"wolf", "flood", "raider", "beast", "fever", "landslide"};

constexpr std::array kCalm = {
    "{a} walked to the {p} with {b}.",
    "{a} shared bread with {b} at the {p}.",
    "the {p} was quiet and warm that day.",
    "{a} smiled at {b} near the {p}.",
    "{b} mended a basket by the {p}.",
    "{a} told {b} an old story about the {p}.",
};
constexpr std::array kTense = {
    "a {t} appeared near the {p}.",
    "{a} was afraid of the {t}.",
    "the {t} attacked the {p} in the dark.",
    "{b} screamed as the {t} came closer.",
    "{a} fled from the {p} in panic.",
    "the {t} trapped {b} inside the {p}.",
};
constexpr std::array kResolve = {
    "{a} saved {b} from the {t}.",
    "the {t} was gone and everyone celebrated at the {p}.",
    "{a} and {b} laughed together, safe at last.",
};

std::string fill(std::string_view tmpl, std::string_view a, std::string_view b, std::string_view p,
                 std::string_view t) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] == '{' && i + 2 < tmpl.size() && tmpl[i + 2] == '}') {
      switch (tmpl[i + 1]) {
        case 'a': out += a; break;
        case 'b': out += b; break;
        case 'p': out += p; break;
        case 't': out += t; break;
        default: out += tmpl.substr(i, 3);
      }
      i += 2;
    } else {
      out += tmpl[i];
    }
  }
  return out;
}

Judgment judge(double diff) {
  if (diff > 0.3) return Judgment::BigIncrease;
  if (diff > 0.08) return Judgment::Increase;
  if (diff < -0.3) return Judgment::BigDecrease;
  if (diff < -0.08) return Judgment::Decrease;
  return Judgment::Same;
}

AnnotationSet annotate(const std::string& id, const Vector& tension, Rng& rng) {
  AnnotationSet ann;
  ann.story_id = id;
  for (const char* who : {"a1", "a2", "a3"}) {
    auto& seq = ann.annotators[who];
    for (std::size_t t = 0; t < tension.size(); ++t) {
      const double prev = t == 0 ? tension[0] : tension[t - 1];
      seq.push_back(judge(tension[t] - prev + (rng.uniform() * 2.0 - 1.0) * 0.12));
    }
  }
  return ann;
}

std::string condense(const std::string& sentence) {
  const auto toks = tokenize(sentence);
  const std::size_t keep = std::max<std::size_t>(1, (toks.size() * 7 + 9) / 10);
  std::string out;
  for (std::size_t i = 0; i < keep; ++i) {
    if (i != 0) out += ' ';
    out += toks[i];
  }
  return out + '.';
}

constexpr std::array kTheoryFractions = {0.10, 0.25, 0.50, 0.75, 0.94};

GoldLabels turning_point_gold(const std::string& id, std::size_t n, const std::vector<std::size_t>& positions) {
  GoldLabels g;
  g.kind = GoldKind::TurningPoints;
  g.story_id = id;
  g.story_length = n;
  g.tp_positions = positions;
  std::vector<IndexRange> windows;
  const auto half = std::max<std::size_t>(1, n / 10);
  for (std::size_t j = 0; j < positions.size(); ++j) {
    const auto theory = static_cast<std::size_t>(kTheoryFractions[j] * static_cast<double>(n - 1));
    const std::size_t lo = std::min(positions[j], theory > half ? theory - half : 0);
    const std::size_t hi = std::max(positions[j], std::min(n - 1, theory + half));
    windows.push_back({lo, hi});
  }
  g.tp_windows = std::move(windows);
  return g;
}

SyntheticStory generate(std::size_t number, Rng& rng) {
  SyntheticStory s;
  s.id = "story" + std::to_string(number);
  const std::size_t n = 18 + rng.below(13);

  std::vector<std::size_t> tps;
  for (const double f : kTheoryFractions) {
    const double jitter = (rng.uniform() * 2.0 - 1.0) * 0.04;
    const double x = std::clamp(f + jitter, 0.0, 1.0) * static_cast<double>(n - 1);
    auto pos = static_cast<std::size_t>(std::lround(x));
    if (!tps.empty()) pos = std::max(pos, tps.back() + 1);
    tps.push_back(std::min(pos, n - 1));
  }
  for (std::size_t j = tps.size(); j-- > 1;) {
    if (tps[j] <= tps[j - 1]) tps[j - 1] = tps[j] - 1;
  }

  s.tension.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double x = static_cast<double>(t) / static_cast<double>(n - 1);
    double v = 0.15 + 0.45 * std::pow(x, 1.5);
    for (std::size_t j = 0; j < tps.size(); ++j) {
      const double d = static_cast<double>(t) - static_cast<double>(tps[j]);
      v += (0.2 + 0.06 * static_cast<double>(j)) * std::exp(-d * d / 2.0);
    }
    if (t == n - 1) v = 0.1;
    s.tension[t] = std::clamp(v, 0.0, 1.0);
  }

  const std::size_t ia = rng.below(kNames.size());
  const std::string a = kNames[ia];
  const std::string b = kNames[(ia + 1 + rng.below(kNames.size() - 1)) % kNames.size()];
  const std::string threat = kThreats[rng.below(kThreats.size())];
  for (std::size_t t = 0; t < n; ++t) {
    const std::string place = kPlaces[rng.below(kPlaces.size())];
    std::string_view tmpl;
    if (t == n - 1) {
      tmpl = kResolve[rng.below(kResolve.size())];
    } else if (s.tension[t] >= 0.45) {
      tmpl = kTense[rng.below(kTense.size())];
    } else {
      tmpl = kCalm[rng.below(kCalm.size())];
    }
    s.sentences.push_back(fill(tmpl, a, b, place, threat));
  }

  for (std::size_t t = 0; t < n; ++t) {
    const bool peak = std::find(tps.begin(), tps.end(), t) != tps.end();
    if (peak || rng.uniform() < 0.08) {
      s.summary_sources.push_back(t);
      s.summary.push_back(condense(s.sentences[t]));
    }
  }
  s.annotations = annotate(s.id, s.tension, rng);
  s.turning_points = turning_point_gold(s.id, n, tps);
  return s;
}

}  // namespace

SyntheticStory pivot_story() {
  SyntheticStory s;
  s.id = "pivot";
  s.sentences = {
      "the village was quiet in the spring morning.",
      "kesh walked to the well with her brother.",
      "an old baker sang near the road.",
      "then a silver comet crossed the sky, the silver comet blazed, a silver comet over every roof.",
      "everyone watched the silver comet fall.",
      "the silver comet cracked the field open.",
      "children ran toward the silver comet.",
      "kesh touched the silver comet and smiled.",
      "elders said the silver comet was a gift.",
      "that night the village slept.",
  };
  s.tension = {0.1, 0.1, 0.15, 0.9, 0.7, 0.75, 0.6, 0.5, 0.4, 0.1};
  s.pivot = 3;
  s.summary_sources = {3, 5, 7};
  for (const auto i : s.summary_sources) s.summary.push_back(condense(s.sentences[i]));
  Rng rng(0x5eed);
  s.annotations = annotate(s.id, s.tension, rng);
  s.turning_points = turning_point_gold(s.id, s.sentences.size(), {1, 3, 5, 7, 8});
  return s;
}

SyntheticCorpus make_synthetic_corpus(std::uint64_t seed, std::size_t story_count) {
  SyntheticCorpus c;
  c.seed = seed;
  Rng rng(seed);
  for (std::size_t i = 0; i < story_count; ++i) c.stories.push_back(generate(i, rng));
  c.stories.push_back(pivot_story());
  return c;
}

}  // namespace narr
