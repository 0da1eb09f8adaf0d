#include <gtest/gtest.h>

#include <set>

#include "subword/config.h"

using namespace subword;

TEST(Labels, ExactlySixtyInTable) {
  const auto labels = all_config_labels();
  EXPECT_EQ(labels.size(), 60u);
  EXPECT_EQ(std::set<std::string>(labels.begin(), labels.end()).size(), 60u);
  int sms = 0, morf = 0, bpe = 0;
  for (const auto& l : labels) {
    sms += l.rfind("sms.", 0) == 0;
    morf += l.rfind("morf.", 0) == 0;
    bpe += l.rfind("bpe.", 0) == 0;
  }
  EXPECT_EQ(sms, 24);
  EXPECT_EQ(morf, 18);
  EXPECT_EQ(bpe, 18);
}

TEST(Labels, RoundTripAllSixty) {
  for (const auto& l : all_config_labels()) {
    EXPECT_EQ(format_config_label(parse_config_label(l)), l);
  }
}

TEST(Labels, ExhaustiveGrammarAcceptsOnlyTheSixty) {
  const auto valid = all_config_labels();
  const std::set<std::string> table(valid.begin(), valid.end());
  int accepted = 0;
  for (const char* seg : {"sms", "morf", "bpe", "ngram", "word", "chipmunk"}) {
    for (const char* wt : {"w-", "ww", "wx"}) {
      for (const char* mid : {"p-", "pp", "mp", "st", "off"}) {
        for (const char* comp : {"add", "att", "mtx", "cnn"}) {
          const std::string label = std::string(seg) + "." + wt + "." + mid + "." + comp;
          bool ok = true;
          try {
            parse_config_label(label);
          } catch (const std::invalid_argument&) {
            ok = false;
          }
          EXPECT_EQ(ok, table.count(label) == 1) << label;
          accepted += ok;
        }
      }
    }
  }
  EXPECT_EQ(accepted, 60);
}

TEST(Labels, Examples) {
  const auto a = parse_config_label("sms.w-.st.att");
  EXPECT_EQ(a.segmenter, SegmenterKind::kSupervised);
  EXPECT_EQ(a.word_token, WordToken::kExclude);
  EXPECT_EQ(a.tag_mode, TagMode::kConcat);
  EXPECT_EQ(a.position_mode, PositionMode::kNone);
  EXPECT_EQ(a.composition, Composition::kAttention);

  const auto b = parse_config_label("bpe.ww.mp.add");
  EXPECT_EQ(b.segmenter, SegmenterKind::kBpe);
  EXPECT_EQ(b.word_token, WordToken::kInclude);
  EXPECT_EQ(b.tag_mode, TagMode::kOff);
  EXPECT_EQ(b.position_mode, PositionMode::kMultiplicative);
  EXPECT_EQ(b.composition, Composition::kAdd);
}

TEST(Labels, TagsExcludePositions) {
  for (const char* l : {"sms.ww.st.pp.add", "sms.ww.st.mp.att", "sms.w-.pp.st.mtx"}) {
    try {
      parse_config_label(l);
      FAIL() << l;
    } catch (const std::invalid_argument& e) {
      EXPECT_NE(std::string(e.what()).find("mutually exclusive"), std::string::npos) << l;
    }
  }
  PipelineConfig c = parse_config_label("sms.ww.st.add");
  c.position_mode = PositionMode::kAdditive;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Labels, TagsNeedSupervisedSegmenter) {
  EXPECT_THROW(parse_config_label("morf.ww.st.add"), std::invalid_argument);
  EXPECT_THROW(parse_config_label("bpe.w-.st.att"), std::invalid_argument);
}

TEST(Labels, MalformedRejected) {
  for (const char* l : {"", "sms", "sms.ww", "sms.ww.pp", "sms.ww.pp.add.x", "SMS.ww.pp.add",
                        "sms..pp.add", "sms.ww.pp.add."}) {
    EXPECT_THROW(parse_config_label(l), std::invalid_argument) << l;
  }
}

TEST(Labels, BaselinesOnlyThroughRunLabels) {
  EXPECT_THROW(parse_config_label("word.w-.p-.add"), std::invalid_argument);
  const auto sgns = parse_run_label("word.w-.p-.add");
  EXPECT_EQ(sgns.segmenter, SegmenterKind::kWholeWord);
  const auto ft = parse_run_label("ngram.ww.p-.add");
  EXPECT_EQ(ft.segmenter, SegmenterKind::kCharNgram);
  EXPECT_EQ(format_config_label(ft), "ngram.ww.p-.add");
  EXPECT_EQ(parse_run_label("bpe.ww.pp.mtx"), parse_config_label("bpe.ww.pp.mtx"));
}

TEST(Config, DefaultsAndHeads) {
  PipelineConfig c;
  EXPECT_EQ(c.dim, 300);
  EXPECT_EQ(c.attention_hidden, 64);
  EXPECT_EQ(c.heads, 4);
  EXPECT_EQ(c.position_cap, 20);
  c.composition = Composition::kAttention;
  EXPECT_EQ(c.attention_heads(), 1);
  c.composition = Composition::kMultiHead;
  EXPECT_EQ(c.attention_heads(), 4);
  c.heads = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}
