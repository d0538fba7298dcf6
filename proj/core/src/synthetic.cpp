#include <cstdio>
#include <filesystem>
#include <random>

#include "clintime/pipeline.hpp"
#include "clintime/standoff.hpp"
#include "clintime/tern.hpp"

namespace clintime::pipeline {

namespace {

// ASCII-only builder: code-point offsets equal byte offsets
struct DocBuilder {
  AnnotatedDocument ad;
  int eventN = 0, timexN = 0, linkN = 0;

  std::int64_t pos() const { return static_cast<std::int64_t>(ad.doc.text.size()); }

  void emit(const std::string& s) {
    if (!ad.doc.text.empty() && ad.doc.text.back() != '\n') ad.doc.text.push_back(' ');
    ad.doc.text += s;
  }
  Span emit_span(const std::string& s) {
    if (!ad.doc.text.empty() && ad.doc.text.back() != '\n') ad.doc.text.push_back(' ');
    Span sp{pos(), pos() + static_cast<std::int64_t>(s.size())};
    ad.doc.text += s;
    return sp;
  }
  std::string event(const std::string& surface, EventCategory cat, bool negated = false) {
    EventMention e;
    e.id = "E" + std::to_string(++eventN);
    e.span = emit_span(surface);
    e.category = cat;
    e.negated = negated;
    ad.events.push_back(e);
    return e.id;
  }
  std::string timex(const std::string& surface, TimexType t, const std::string& value) {
    TimexMention m;
    m.id = "T" + std::to_string(++timexN);
    m.span = emit_span(surface);
    m.ttype = t;
    m.value = value;
    ad.timexes.push_back(m);
    return m.id;
  }
  void link(const std::string& s, const std::string& t, Relation r, LinkOrigin o) {
    ad.tlinks.push_back({"L" + std::to_string(++linkN), s, t, r, o});
  }
};

const std::vector<std::string> kProblems = {
    "hypertension", "nausea",     "dizziness", "vomiting",  "chest pain",
    "shortness of breath", "fever", "headaches", "anemia",  "pneumonia"};
const std::vector<std::string> kTreatments = {
    "aspirin", "ibuprofen", "steroids", "antibiotics", "insulin",
    "warfarin", "lisinopril", "chemotherapy"};
const std::vector<std::string> kTests = {
    "MRI", "CT scan", "biopsy", "ultrasound", "echocardiogram", "colonoscopy"};

template <class Rng>
const std::string& pick(const std::vector<std::string>& v, Rng& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

template <class Rng>
std::pair<std::string, std::string> random_date(Rng& rng) {
  int y = std::uniform_int_distribution<int>(1985, 1999)(rng);
  int m = std::uniform_int_distribution<int>(1, 12)(rng);
  int d = std::uniform_int_distribution<int>(1, 28)(rng);
  char surface[16], value[16];
  std::snprintf(surface, sizeof surface, "%02d/%02d/%04d", m, d, y);
  std::snprintf(value, sizeof value, "%04d-%02d-%02d", y, m, d);
  return {surface, value};
}

template <class Rng>
void add_sentence(DocBuilder& b, Rng& rng) {
  switch (std::uniform_int_distribution<int>(0, 8)(rng)) {
    case 0: {
      b.emit("The patient reported");
      std::string p1 = b.event(pick(kProblems, rng), EventCategory::Problem);
      b.emit("and");
      std::string p2 = b.event(pick(kProblems, rng), EventCategory::Problem);
      b.emit(".");
      b.link(p1, p2, Relation::Overlap, LinkOrigin::Coordinate);
      break;
    }
    case 1: {
      b.emit("The doctor prescribed");
      std::string t = b.event(pick(kTreatments, rng), EventCategory::Treatment);
      b.emit("for");
      std::string p = b.event(pick(kProblems, rng), EventCategory::Problem);
      b.emit(".");
      b.link(t, p, Relation::Before, LinkOrigin::Prepositional);
      break;
    }
    case 2: {
      b.emit("The");
      std::string te = b.event(pick(kTests, rng), EventCategory::Test);
      b.emit("showed");
      std::string p = b.event(pick(kProblems, rng), EventCategory::Problem);
      b.emit(".");
      b.link(te, p, Relation::Before, LinkOrigin::Other);
      break;
    }
    case 3: {
      b.emit("She received");
      std::string t = b.event(pick(kTreatments, rng), EventCategory::Treatment);
      b.emit("on");
      auto [surface, value] = random_date(rng);
      std::string d = b.timex(surface, TimexType::Date, value);
      b.emit(".");
      b.link(t, d, Relation::Overlap, LinkOrigin::Prepositional);
      break;
    }
    case 4: {
      b.emit("He developed");
      std::string p = b.event(pick(kProblems, rng), EventCategory::Problem);
      b.emit("after");
      std::string t = b.event(pick(kTreatments, rng), EventCategory::Treatment);
      b.emit(".");
      b.link(p, t, Relation::After, LinkOrigin::Prepositional);
      break;
    }
    case 5: {
      b.emit("He took");
      b.event(pick(kTreatments, rng), EventCategory::Treatment);
      static const std::pair<const char*, const char*> freqs[] = {
          {"qd", "RP24H"}, {"bid", "RP12H"}, {"tid", "RP8H"}};
      auto [surface, value] = freqs[std::uniform_int_distribution<int>(0, 2)(rng)];
      b.timex(surface, TimexType::Frequency, value);
      b.emit(".");
      break;
    }
    case 6: {
      b.emit("Symptoms persisted for");
      static const std::pair<const char*, const char*> durs[] = {
          {"two weeks", "P2W"}, {"three days", "P3D"}, {"five months", "P5M"}};
      auto [surface, value] = durs[std::uniform_int_distribution<int>(0, 2)(rng)];
      b.timex(surface, TimexType::Duration, value);
      b.emit(".");
      break;
    }
    case 7: {
      b.emit("She was seen on");
      auto [surface, value] = random_date(rng);
      b.timex(surface, TimexType::Date, value);
      b.emit(".");
      break;
    }
    case 8: {
      b.emit("The patient denied");
      b.event(pick(kProblems, rng), EventCategory::Problem, /*negated=*/true);
      b.emit(".");
      break;
    }
  }
}

}  // namespace

std::vector<AnnotatedDocument> synthetic_corpus(const SyntheticOptions& opt) {
  std::vector<AnnotatedDocument> docs;
  for (int d = 0; d < opt.documents; ++d) {
    // one independent stream per document: corpus prefixes are stable
    std::mt19937 rng(opt.seed + static_cast<unsigned>(d) * 7919u);
    DocBuilder b;
    char id[32];
    std::snprintf(id, sizeof id, "SYN-%04d", d + 1);
    b.ad.doc.id = id;
    tern::CivilDate dct = tern::add_days({1990, 6, 15}, d);
    b.ad.doc.meta["dct"] = dct.iso();
    for (int s = 0; s < opt.sentencesPerDocument; ++s) add_sentence(b, rng);
    // every event anchors to the creation date
    for (const auto& e : b.ad.events)
      b.link(e.id, kStDct, Relation::Before, LinkOrigin::Sectime);
    docs.push_back(std::move(b.ad));
  }
  return docs;
}

void gen_synthetic(const std::string& outDir, const SyntheticOptions& opt) {
  std::filesystem::create_directories(outDir);
  for (const auto& ad : synthetic_corpus(opt))
    standoff::write_file(ad, (std::filesystem::path(outDir) / (ad.doc.id + ".ann")).string());
}

}  // namespace clintime::pipeline
