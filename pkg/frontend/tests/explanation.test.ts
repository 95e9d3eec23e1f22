import { describe, expect, it } from "vitest";

import { OperatorClient } from "../src/client.js";
import {
  buildTree,
  leavesOf,
  notInModel,
  renderExplanation,
  toggleAt,
  TreeNode,
} from "../src/explanation.js";
import { ExplanationNode } from "../src/types.js";
import { fixtures, MockService } from "./harness.js";

function goldenView() {
  const doc = fixtures.explanation();
  return buildTree(doc.tree.atom, doc.tree);
}

describe("explanation tree", () => {
  it("target_change(1,2) has three child branches", () => {
    const view = goldenView();
    expect(view.kind).toBe("tree");
    if (view.kind !== "tree") return;
    expect(view.root.atom).toBe("target_change(1,2)");
    expect(view.root.children.map((c) => c.atom)).toEqual([
      "plan(1,2,6,5)",
      "new_plan(1,2,6,5)",
      "target_change_request(1,2)",
    ]);
  });

  it("every leaf of the golden tree is a fact or an absence", () => {
    const view = goldenView();
    if (view.kind !== "tree") throw new Error("expected tree");
    const leaves = leavesOf(view.root);
    expect(leaves.length).toBeGreaterThan(0);
    for (const leaf of leaves) {
      expect(["fact", "absence"]).toContain(leaf.leaf);
    }
    const facts = leaves.filter((l) => l.leaf === "fact");
    expect(facts.map((l) => l.atom)).toContain("plan(1,1,7,6)");
    for (const fact of facts) {
      expect(fact.rule.endsWith(".")).toBe(true);
      expect(fact.rule).not.toContain(":-");
    }
  });

  it("marks absences and aggregates as distinct leaf kinds", () => {
    const synthetic: ExplanationNode = {
      atom: "q(1)",
      rule: "q(X) :- r(X), not p(X, _).",
      children: [
        { atom: "r(1)", rule: "r(1).", children: [], absent: [], aggregates: [] },
      ],
      absent: ["no instance of p(1,_) (absent from answer set)"],
      aggregates: [
        { guard: 5, relation: "<=", count: 6, witnesses: [[1], [2]] },
      ],
    };
    const view = buildTree("q(1)", synthetic);
    if (view.kind !== "tree") throw new Error("expected tree");
    const kinds = leavesOf(view.root).map((l) => l.leaf);
    expect(kinds).toEqual(["fact", "absence", "aggregate"]);
    const text = renderExplanation(view);
    expect(text).toContain("[fact]");
    expect(text).toContain("[absent]");
    expect(text).toContain("[count]");
  });

  it("collapses subtrees via index paths", () => {
    const view = goldenView();
    if (view.kind !== "tree") throw new Error("expected tree");
    expect(toggleAt(view.root, [0])).toBe(true);
    const collapsed: TreeNode = view.root.children[0]!;
    expect(collapsed.expanded).toBe(false);
    const text = renderExplanation(view);
    expect(text).toContain(
      `... (${collapsed.children.length} collapsed)`,
    );
    expect(toggleAt(view.root, [0])).toBe(true);
    expect(collapsed.expanded).toBe(true);
    expect(toggleAt(view.root, [9, 9])).toBe(false);
  });

  it("renders not-in-model inline", () => {
    const view = notInModel("target_change(9,9)", "not in the answer set");
    expect(renderExplanation(view)).toBe(
      "target_change(9,9): not in the current model (not in the answer set)",
    );
  });

  it("fetches trees and stale atoms through the client", async () => {
    const service = new MockService();
    const client = new OperatorClient("http://svc", service.fetch);

    const hit = await client.explanation("target_change(1,2)");
    expect(hit.ok).toBe(true);
    if (hit.ok) {
      expect(hit.doc.tree.children).toHaveLength(3);
    }

    const miss = await client.explanation("target_change(9,9)");
    expect(miss.ok).toBe(false);
    if (!miss.ok) {
      expect(miss.status).toBe(404);
      const view = notInModel("target_change(9,9)", miss.detail);
      expect(renderExplanation(view)).toContain("not in the");
    }
  });
});
