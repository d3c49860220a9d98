import init, { extract, subtokens, DemoModel } from "./pkg/cgsearch_web.js";

const $ = (id) => document.getElementById(id);
const SVG = "http://www.w3.org/2000/svg";
const COLUMNS = ["import", "method_name", "parameter", "variable", "call"];
const COLORS = {
  import: "#f4c27a", method_name: "#e07a7a", parameter: "#8fc18f",
  variable: "#7aa6e0", call: "#c59be0",
};

function el(name, attrs, text) {
  const node = document.createElementNS(SVG, name);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

// Nodes sit in one column per kind; edges are arcs labelled with their relation.
function drawGraph(graph) {
  const svg = $("graph");
  svg.replaceChildren(el("defs", {}));
  svg.firstChild.appendChild(el("marker", {
    id: "arrow", viewBox: "0 0 10 10", refX: 10, refY: 5,
    markerWidth: 6, markerHeight: 6, orient: "auto-start-reverse",
  })).appendChild(el("path", { d: "M0,0 L10,5 L0,10 z", fill: "#999" }));

  const pos = [];
  const counts = {};
  const perColumn = {};
  for (const n of graph.nodes) perColumn[n.kind] = (perColumn[n.kind] || 0) + 1;
  for (const n of graph.nodes) {
    const col = COLUMNS.indexOf(n.kind);
    const row = (counts[n.kind] = (counts[n.kind] || 0) + 1);
    pos[n.id] = { x: 80 + col * 150, y: (360 * row) / (perColumn[n.kind] + 1) };
  }
  for (const e of graph.edges) {
    const a = pos[e.src], b = pos[e.dst];
    const mx = (a.x + b.x) / 2, my = (a.y + b.y) / 2 - 30;
    const g = el("g", { class: "edge" });
    g.appendChild(el("path", { d: `M${a.x},${a.y} Q${mx},${my} ${b.x},${b.y}`, "marker-end": "url(#arrow)" }));
    g.appendChild(el("text", { x: mx, y: my + 12 }, e.kind));
    svg.appendChild(g);
  }
  for (const n of graph.nodes) {
    const { x, y } = pos[n.id];
    const g = el("g", { class: "node" });
    g.appendChild(el("ellipse", { cx: x, cy: y, rx: 48, ry: 14, fill: COLORS[n.kind] }));
    g.appendChild(el("text", { x, y }, n.name));
    g.appendChild(el("title", {}, `${n.name} (${n.kind})`));
    svg.appendChild(g);
  }
}

function runExtract() {
  $("extract-error").textContent = "";
  try {
    const out = JSON.parse(extract($("source").value));
    drawGraph(out.graph);
    $("stats").textContent = JSON.stringify(out.stats, null, 2);
  } catch (err) {
    $("extract-error").textContent = err.message ?? String(err);
  }
}

function runSubtokens() {
  const chips = JSON.parse(subtokens($("identifiers").value)).map((t) => {
    const span = document.createElement("span");
    span.textContent = t;
    return span;
  });
  $("subtokens").replaceChildren(...chips);
}

let model = null;

function runTrain() {
  $("train-status").textContent = "training...";
  $("search-btn").disabled = true;
  // Let the status paint before the blocking call.
  setTimeout(() => {
    try {
      model?.free();
      const started = performance.now();
      model = new DemoModel(Number($("corpus-n").value), 1, Number($("epochs").value));
      const s = JSON.parse(model.summary());
      $("train-status").textContent = `done in ${((performance.now() - started) / 1000).toFixed(1)} s`;
      const losses = s.epochs.map((m) => m.train_loss.toFixed(3)).join(" ");
      $("summary").textContent =
        `splits ${s.train}/${s.valid}/${s.test}, loss ${s.initial_loss.toFixed(3)} -> ${losses}\n` +
        `test MRR ${s.test_mrr.toFixed(3)}, without graph vectors ${s.test_mrr_nograph.toFixed(3)}`;
      $("search-btn").disabled = false;
    } catch (err) {
      $("train-status").textContent = err.message ?? String(err);
    }
  }, 20);
}

function runSearch() {
  const hits = JSON.parse(model.search($("query").value, 5, $("use-graph").checked));
  $("hits").replaceChildren(...hits.map((h) => {
    const li = document.createElement("li");
    const head = document.createElement("div");
    head.textContent = `${h.score.toFixed(3)}  ${h.query}`;
    const code = document.createElement("pre");
    code.textContent = h.code;
    li.append(head, code);
    return li;
  }));
}

await init();
$("extract-btn").addEventListener("click", runExtract);
$("identifiers").addEventListener("input", runSubtokens);
$("train-btn").addEventListener("click", runTrain);
$("search-btn").addEventListener("click", runSearch);
runExtract();
runSubtokens();
