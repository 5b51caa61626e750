// Copyright 2026 The SaeSplade Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "saesplade/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "saesplade/error.hpp"
#include "saesplade/index.hpp"

namespace saesplade {

namespace {

double mean_nnz(const std::vector<SparseVector>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (const auto& x : v) s += static_cast<double>(x.nnz());
  return s / static_cast<double>(v.size());
}

std::vector<std::string> ids_of(const EmbeddingCorpus& c) {
  std::vector<std::string> out;
  out.reserve(c.size());
  for (const auto& item : c.items()) out.push_back(item.doc_id());
  return out;
}

}  // namespace

RetrievalMetrics evaluate_encoder(const SaeParams& p,
                                  std::optional<size_t> k_splade,
                                  const EmbeddingCorpus& queries,
                                  const EmbeddingCorpus& docs,
                                  const Qrels& qrels,
                                  const InputNormalizer* normalizer) {
  const auto qv = encode_corpus(p, queries, k_splade, normalizer);
  const auto dv = encode_corpus(p, docs, k_splade, normalizer);
  const auto doc_ids = ids_of(docs);
  const auto index = build_index(doc_ids, dv, static_cast<uint32_t>(p.latents));
  const auto run = search_all(index, ids_of(queries), qv, 10);
  RetrievalMetrics m;
  m.mrr_at_10 = mrr_at_k(run, qrels, 10);
  m.ndcg_at_10 = ndcg_at_k(run, qrels, 10);
  m.qd_flops = qd_flops(qv, dv);
  m.avg_doc_len = mean_nnz(dv);
  m.avg_query_len = mean_nnz(qv);
  m.delta_e2 = delta_e2({m.mrr_at_10, m.qd_flops});
  return m;
}

SaeParams train_task_sae(const RelevanceTask& task, const SaeTrainConfig& cfg,
                         SaeTrainReport* report,
                         std::optional<InputNormalizer>* normalizer) {
  EmbeddingCorpus all(task.docs.dim());
  for (const auto& item : task.docs.items()) all.add(item);
  for (const auto& item : task.train_queries.items()) all.add(item);
  auto result = train_sae(all, cfg);
  if (report) *report = result.report;
  if (normalizer) *normalizer = result.normalizer;
  return std::move(result.params);
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
  const auto task = generate_relevance_task(cfg.task);
  PipelineResult out;
  out.sae_params = train_task_sae(task, cfg.sae, &out.sae_report, &out.normalizer);
  const InputNormalizer* norm = out.normalizer ? &*out.normalizer : nullptr;
  IrTrainConfig ir = cfg.ir;
  ir.normalize_inputs = norm != nullptr;
  out.before = evaluate_encoder(out.sae_params, ir.k_splade, task.test_queries,
                                task.docs, task.test_qrels, norm);
  auto ft = finetune(out.sae_params, task.train_queries, task.docs,
                     task.train_triples, ir, norm);
  out.finetuned = std::move(ft.params);
  out.finetune_report = std::move(ft.report);
  out.after = evaluate_encoder(out.finetuned, ir.k_splade, task.test_queries,
                               task.docs, task.test_qrels, norm);
  return out;
}

std::vector<SweepRow> run_sweep(const PipelineConfig& base,
                                const std::vector<SweepPoint>& grid) {
  if (grid.empty()) throw InvalidArgument("sweep: empty grid");
  const auto task = generate_relevance_task(base.task);
  struct Trained {
    SaeParams params;
    std::optional<InputNormalizer> normalizer;
  };
  std::map<size_t, Trained> saes;
  std::vector<SweepRow> rows;
  for (const auto& pt : grid) {
    if (pt.flops_multiplier < 0.0) {
      throw InvalidArgument("sweep: flops multiplier must be >= 0");
    }
    auto it = saes.find(pt.k_sae);
    if (it == saes.end()) {
      SaeTrainConfig sc = base.sae;
      sc.k_sae = pt.k_sae;
      Trained t;
      t.params = train_task_sae(task, sc, nullptr, &t.normalizer);
      it = saes.emplace(pt.k_sae, std::move(t)).first;
    }
    const InputNormalizer* norm =
        it->second.normalizer ? &*it->second.normalizer : nullptr;
    IrTrainConfig ir = base.ir;
    ir.k_splade = pt.k_splade;
    ir.lambda_flops_d *= pt.flops_multiplier;
    ir.lambda_flops_q *= pt.flops_multiplier;
    ir.normalize_inputs = norm != nullptr;
    const auto ft = finetune(it->second.params, task.train_queries, task.docs,
                             task.train_triples, ir, norm);
    rows.push_back({pt, evaluate_encoder(ft.params, pt.k_splade, task.test_queries,
                                         task.docs, task.test_qrels, norm)});
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os.precision(10);
  os << "k_sae,k_splade,flops_multiplier,mrr_at_10,ndcg_at_10,qd_flops,"
        "avg_doc_len,avg_query_len,delta_e2\n";
  for (const auto& r : rows) {
    os << r.point.k_sae << ',';
    if (r.point.k_splade) os << *r.point.k_splade;
    os << ',' << r.point.flops_multiplier << ',' << r.metrics.mrr_at_10 << ','
       << r.metrics.ndcg_at_10 << ',' << r.metrics.qd_flops << ','
       << r.metrics.avg_doc_len << ',' << r.metrics.avg_query_len << ','
       << r.metrics.delta_e2 << '\n';
  }
  return os.str();
}

std::string sweep_svg(const std::vector<SweepRow>& rows) {
  constexpr double W = 640, H = 480, L = 70, R = 20, T = 30, B = 60;
  double xmax = 0.0, ymin = 1.0, ymax = 0.0;
  for (const auto& r : rows) {
    xmax = std::max(xmax, r.metrics.qd_flops);
    ymin = std::min(ymin, r.metrics.mrr_at_10);
    ymax = std::max(ymax, r.metrics.mrr_at_10);
  }
  xmax = xmax > 0.0 ? xmax * 1.1 : 1.0;
  if (ymax - ymin < 1e-6) {
    ymin -= 0.05;
    ymax += 0.05;
  }
  const double pad = 0.1 * (ymax - ymin);
  ymin = std::max(0.0, ymin - pad);
  ymax = std::min(1.0, ymax + pad);
  auto px = [&](double x) { return L + (W - L - R) * x / xmax; };
  auto py = [&](double y) { return H - B - (H - T - B) * (y - ymin) / (ymax - ymin); };

  std::ostringstream os;
  char buf[256];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
     << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
                L, H - B, W - R, H - B);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
                L, T, L, H - B);
  os << buf;
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmax * i / 4, yv = ymin + (ymax - ymin) * i / 4;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%.2f</text>\n",
                  px(xv), H - B + 16, xv);
    os << buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.3f</text>\n",
                  L - 6, py(yv) + 4, yv);
    os << buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">QD-FLOPs</text>\n",
                (L + W - R) / 2, H - 20);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"16\" y=\"%.1f\" transform=\"rotate(-90 16 %.1f)\" "
                "text-anchor=\"middle\">MRR@10</text>\n",
                (T + H - B) / 2, (T + H - B) / 2);
  os << buf;
  for (const auto& r : rows) {
    const double x = px(r.metrics.qd_flops), y = py(r.metrics.mrr_at_10);
    std::snprintf(buf, sizeof buf,
                  "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"4\" fill=\"steelblue\"/>\n", x, y);
    os << buf;
    std::string label = "k=" + std::to_string(r.point.k_sae) + "/" +
                        (r.point.k_splade ? std::to_string(*r.point.k_splade) : "M");
    std::snprintf(buf, sizeof buf, " x%.3g", r.point.flops_multiplier);
    label += buf;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\">%s</text>\n", x + 6,
                  y - 6, label.c_str());
    os << buf;
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace saesplade
