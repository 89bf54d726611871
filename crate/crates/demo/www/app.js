import init, { analyze_scales, search_fundamental, downgrade_points }
  from "../pkg/scalescope_demo.js";

const $ = (id) => document.getElementById(id);
let lastSearch = null;

function fmt(x, digits = 4) {
  return Number(x).toFixed(digits);
}

function renderTable(rows) {
  const tbody = $("table").querySelector("tbody");
  tbody.innerHTML = "";
  for (const r of rows) {
    const tr = document.createElement("tr");
    for (const v of [r.scale, r.L_units, r.scope_L, r.diversity_D,
                     fmt(r.entropy_h), fmt(r.specific_d)]) {
      const td = document.createElement("td");
      td.textContent = v;
      tr.appendChild(td);
    }
    tbody.appendChild(tr);
  }
  $("table").hidden = false;
}

function colorFor(symbol, palette) {
  if (!palette.has(symbol)) {
    const k = palette.size;
    palette.set(symbol, `hsl(${(k * 137.508) % 360} 65% 85%)`);
  }
  return palette.get(symbol);
}

function renderSegments(segments) {
  const host = $("segments");
  host.innerHTML = "";
  const palette = new Map();
  for (const s of segments) {
    const span = document.createElement("span");
    span.textContent = s.replaceAll(" ", "␣");
    span.style.background = colorFor(s, palette);
    span.title = `${s.length} units`;
    host.appendChild(span);
  }
}

function axes(ctx, w, h) {
  ctx.clearRect(0, 0, w, h);
  ctx.strokeStyle = "#d9dee6";
  ctx.strokeRect(40.5, 10.5, w - 55, h - 45);
}

function renderTrace(trace, initial) {
  const cv = $("trace");
  const ctx = cv.getContext("2d");
  const [w, h] = [cv.width, cv.height];
  axes(ctx, w, h);
  const hs = [Math.max(...initial.map((r) => r.entropy_h)), ...trace.map((t) => t.h)];
  const n = hs.length;
  const x = (i) => 40 + ((w - 55) * i) / Math.max(1, n - 1);
  const y = (v) => 10 + (h - 45) * (1 - v);
  ctx.strokeStyle = "#2563eb";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  hs.forEach((v, i) => (i === 0 ? ctx.moveTo(x(i), y(v)) : ctx.lineTo(x(i), y(v))));
  ctx.stroke();
  ctx.fillStyle = "#66707f";
  ctx.font = "11px system-ui";
  ctx.fillText("h = 1", 6, y(1) + 4);
  ctx.fillText("h = 0", 6, y(0) + 4);
  ctx.fillText(`${trace.length} accepted moves`, 44, h - 14);
}

function logLog(ctx, pts, w, h, maxRank, color, radius) {
  const lx = (r) => 40 + (w - 55) * (Math.log(r) / Math.log(Math.max(2, maxRank)));
  const masses = pts.map((p) => p.mass).filter((m) => m > 0);
  const lo = Math.log(Math.min(...masses)) - 0.2;
  const hi = Math.log(Math.max(...masses)) + 0.2;
  const ly = (m) => 10 + (h - 45) * (1 - (Math.log(m) - lo) / (hi - lo));
  ctx.fillStyle = color;
  for (const p of pts) {
    if (p.mass <= 0) continue;
    ctx.beginPath();
    ctx.arc(lx(Math.max(1, p.rank)), ly(p.mass), radius, 0, 2 * Math.PI);
    ctx.fill();
  }
}

function renderProfile() {
  if (!lastSearch) return;
  const cv = $("profile");
  const ctx = cv.getContext("2d");
  axes(ctx, cv.width, cv.height);
  const symbols = lastSearch.symbols;
  const full = symbols.map((s, i) => ({ rank: i + 1, mass: s.p }));
  const maxRank = symbols.length;
  logLog(ctx, full, cv.width, cv.height, maxRank, "#2563eb", 2.5);
  const target = Math.max(1, Number($("target").value) | 0);
  try {
    const down = JSON.parse(downgrade_points(
      JSON.stringify(symbols), BigInt(lastSearch.report.L_units), target));
    logLog(ctx, down, cv.width, cv.height, maxRank, "#ea8023", 4);
  } catch (e) {
    console.error(e);
  }
}

async function main() {
  await init();

  $("analyze").onclick = () => {
    try {
      renderTable(JSON.parse(analyze_scales($("text").value)));
      $("searchout").hidden = true;
    } catch (e) {
      alert(e);
    }
  };

  $("search").onclick = () => {
    try {
      const view = JSON.parse(search_fundamental(
        $("text").value,
        BigInt(Math.max(0, Number($("seed").value) | 0)),
        Math.max(1, Number($("restarts").value) | 0),
        Math.max(1, Number($("passes").value) | 0),
      ));
      lastSearch = view;
      renderTable([...view.initial, view.report]);
      $("finalh").textContent =
        `h = ${fmt(view.report.entropy_h)}, D = ${view.report.diversity_D}, ` +
        `L = ${view.report.scope_L}`;
      renderSegments(view.segments);
      renderTrace(view.trace, view.initial);
      renderProfile();
      $("searchout").hidden = false;
    } catch (e) {
      alert(e);
    }
  };

  $("target").oninput = renderProfile;
}

main();
