import init, { Workbench, compareCounts, exploreWeibull } from "./pkg/cvsynth_wasm_demo.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function fail(el, err) {
  el.innerHTML = "";
  const p = document.createElement("p");
  p.className = "err";
  p.textContent = String(err && err.message ? err.message : err);
  el.appendChild(p);
}

function axes(ctx, w, h, pad) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#999";
  ctx.beginPath();
  ctx.moveTo(pad, pad / 2);
  ctx.lineTo(pad, h - pad);
  ctx.lineTo(w - pad / 2, h - pad);
  ctx.stroke();
}

function plotWeibull(res, n) {
  const canvas = $("w-plot");
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 30;
  axes(ctx, w, h, pad);
  const bins = res.bins;
  const xmax = bins[bins.length - 1].hi;
  const binWidth = bins[0].hi - bins[0].lo;
  // histogram as a density so it shares the curves' scale
  const heights = bins.map((b) => b.count / (n * binWidth));
  const curveMax = Math.max(...res.density.flatMap(([, a, b]) => [a, b]).filter(Number.isFinite));
  const ymax = Math.max(...heights, curveMax) * 1.1 || 1;
  const sx = (x) => pad + (x / xmax) * (w - 1.5 * pad);
  const sy = (y) => h - pad - (y / ymax) * (h - 1.5 * pad);

  ctx.fillStyle = "#c9d7ea";
  bins.forEach((b, i) => {
    ctx.fillRect(sx(b.lo), sy(heights[i]), Math.max(1, sx(b.hi) - sx(b.lo) - 1), sy(0) - sy(heights[i]));
  });
  const curve = (idx, color, dash) => {
    ctx.strokeStyle = color;
    ctx.setLineDash(dash);
    ctx.lineWidth = 2;
    ctx.beginPath();
    res.density.forEach((d, i) => {
      const y = Number.isFinite(d[idx]) ? Math.min(d[idx], ymax) : ymax;
      if (i === 0) ctx.moveTo(sx(d[0]), sy(y));
      else ctx.lineTo(sx(d[0]), sy(y));
    });
    ctx.stroke();
    ctx.setLineDash([]);
    ctx.lineWidth = 1;
  };
  curve(1, "#1f4e8c", []);
  curve(2, "#d9480f", [6, 4]);
  ctx.fillStyle = "#333";
  ctx.fillText("0", pad - 4, h - pad + 14);
  ctx.fillText(xmax.toFixed(1), w - pad - 10, h - pad + 14);
  ctx.fillStyle = "#1f4e8c";
  ctx.fillText("generating density", w - 180, 20);
  ctx.fillStyle = "#d9480f";
  ctx.fillText("fitted density", w - 180, 36);
}

function runWeibull() {
  const out = $("w-out");
  try {
    const n = num("w-n");
    const res = JSON.parse(exploreWeibull(num("w-shape"), num("w-scale"), n, num("w-seed"), 40));
    const f = res.fitted;
    out.textContent =
      f.degenerate_point != null
        ? `degenerate fit at ${f.degenerate_point}`
        : `fitted shape ${f.shape.toFixed(3)}, scale ${f.scale.toFixed(3)} (${f.method.replaceAll("_", " ")}); sample mean ${res.sample_mean.toFixed(3)}`;
    plotWeibull(res, n);
  } catch (e) {
    fail(out, e);
  }
}

function runCompare() {
  const out = $("j-out");
  try {
    const res = JSON.parse(compareCounts($("j-p").value, $("j-q").value));
    out.textContent = `Jensen-Shannon divergence: ${res.js.toFixed(4)}`;
    const canvas = $("j-plot");
    const ctx = canvas.getContext("2d");
    const { width: w, height: h } = canvas;
    const pad = 30;
    axes(ctx, w, h, pad);
    const k = res.categories.length;
    const slot = (w - 1.5 * pad) / k;
    const ymax = Math.max(...res.p, ...res.q) * 1.1;
    const bar = (i, v, offset, color) => {
      const bh = (v / ymax) * (h - 1.5 * pad);
      ctx.fillStyle = color;
      ctx.fillRect(pad + i * slot + offset, h - pad - bh, slot * 0.4, bh);
    };
    res.categories.forEach((c, i) => {
      bar(i, res.p[i], slot * 0.1, "#1f4e8c");
      bar(i, res.q[i], slot * 0.5, "#d9480f");
      ctx.fillStyle = "#333";
      ctx.fillText(c, pad + i * slot + slot * 0.4, h - pad + 14);
    });
    ctx.fillStyle = "#1f4e8c";
    ctx.fillText("reference", w - 120, 20);
    ctx.fillStyle = "#d9480f";
    ctx.fillText("synthetic", w - 120, 36);
  } catch (e) {
    fail(out, e);
  }
}

let bench = null;

function buildCorpus() {
  const status = $("g-status");
  status.textContent = "building mock corpus and tables...";
  $("g-controls").hidden = true;
  $("g-out").innerHTML = "";
  // let the status paint before the synchronous build
  setTimeout(() => {
    try {
      const t0 = performance.now();
      if (bench) bench.free();
      bench = new Workbench(num("g-total"), num("g-seed"), num("g-min"));
      const combos = JSON.parse(bench.combinations());
      const select = $("g-combo");
      select.innerHTML = "";
      combos.forEach((c, i) => {
        const opt = document.createElement("option");
        opt.value = i;
        opt.textContent = `${c.label} (${c.reference_count} CVs)`;
        select.appendChild(opt);
      });
      const ms = Math.round(performance.now() - t0);
      status.textContent = `${combos.length} combinations meet the group threshold (built in ${ms} ms)`;
      $("g-controls").hidden = combos.length === 0;
    } catch (e) {
      bench = null;
      fail(status, e);
    }
  }, 10);
}

function generate() {
  const out = $("g-out");
  out.innerHTML = "";
  try {
    const res = JSON.parse(bench.generate(num("g-combo"), num("g-count"), num("g-aseed")));
    const rejected = Object.entries(res.rejections).map(([k, v]) => `${k.replaceAll("_", " ")} ${v}`);
    const summary = document.createElement("p");
    summary.textContent =
      `${res.produced} CVs in ${res.attempts} tries from ${res.reference_count} reference CVs` +
      (rejected.length ? `; rejected: ${rejected.join(", ")}` : "");
    out.appendChild(summary);
    for (const cv of res.cvs) {
      const details = document.createElement("details");
      details.open = true;
      const title = document.createElement("summary");
      title.textContent = cv.id;
      const md = document.createElement("pre");
      md.textContent = cv.markdown;
      const json = document.createElement("details");
      const jsonTitle = document.createElement("summary");
      jsonTitle.textContent = "JSON";
      const body = document.createElement("pre");
      body.textContent = JSON.stringify(cv.json, null, 2);
      json.append(jsonTitle, body);
      details.append(title, md, json);
      out.appendChild(details);
    }
  } catch (e) {
    fail(out, e);
  }
}

await init();
$("w-run").addEventListener("click", runWeibull);
$("j-run").addEventListener("click", runCompare);
$("g-build").addEventListener("click", buildCorpus);
$("g-run").addEventListener("click", generate);
runWeibull();
runCompare();
