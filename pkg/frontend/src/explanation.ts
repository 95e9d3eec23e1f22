/** Explanation panel: collapsible derivation trees with leaves marked as
 * facts or absences, and inline not-in-model messages. */

import { AggregateLeaf, ExplanationNode } from "./types.js";

export type LeafKind = "fact" | "absence" | "aggregate";

export interface TreeNode {
  atom: string;
  rule: string;
  expanded: boolean;
  /** Set on nodes with no children of their own. */
  leaf: LeafKind | null;
  children: TreeNode[];
  aggregate?: AggregateLeaf;
}

export type ExplanationView =
  | { kind: "tree"; atom: string; root: TreeNode }
  | { kind: "not-in-model"; atom: string; detail: string }
  | { kind: "error"; atom: string; detail: string };

function buildNode(node: ExplanationNode): TreeNode {
  const children: TreeNode[] = node.children.map(buildNode);
  for (const absent of node.absent) {
    children.push({
      atom: absent,
      rule: "",
      expanded: true,
      leaf: "absence",
      children: [],
    });
  }
  for (const aggregate of node.aggregates) {
    children.push({
      atom:
        `#count = ${aggregate.count} ` +
        `(${aggregate.relation} ${aggregate.guard})`,
      rule: "",
      expanded: true,
      leaf: "aggregate",
      children: [],
      aggregate,
    });
  }
  return {
    atom: node.atom,
    rule: node.rule,
    expanded: true,
    leaf: children.length === 0 ? "fact" : null,
    children,
  };
}

export function buildTree(atom: string, tree: ExplanationNode): ExplanationView {
  return { kind: "tree", atom, root: buildNode(tree) };
}

export function notInModel(atom: string, detail: string): ExplanationView {
  return { kind: "not-in-model", atom, detail };
}

export function explanationError(atom: string, detail: string): ExplanationView {
  return { kind: "error", atom, detail };
}

/** Toggle the node at a child-index path; returns false on a bad path. */
export function toggleAt(root: TreeNode, path: number[]): boolean {
  let node: TreeNode | undefined = root;
  for (const index of path) {
    node = node?.children[index];
  }
  if (!node) {
    return false;
  }
  node.expanded = !node.expanded;
  return true;
}

export function leavesOf(root: TreeNode): TreeNode[] {
  if (root.children.length === 0) {
    return [root];
  }
  return root.children.flatMap(leavesOf);
}

/** Render the panel as indented text with leaf badges; collapsed nodes
 * show a summary line instead of their children. */
export function renderExplanation(view: ExplanationView): string {
  if (view.kind === "not-in-model") {
    return `${view.atom}: not in the current model (${view.detail})`;
  }
  if (view.kind === "error") {
    return `${view.atom}: ${view.detail}`;
  }
  const lines: string[] = [];
  const walk = (node: TreeNode, depth: number) => {
    const indent = "  ".repeat(depth);
    const badge =
      node.leaf === "fact"
        ? " [fact]"
        : node.leaf === "absence"
          ? " [absent]"
          : node.leaf === "aggregate"
            ? " [count]"
            : "";
    lines.push(`${indent}${node.atom}${badge}`);
    if (!node.expanded && node.children.length > 0) {
      lines.push(`${indent}  ... (${node.children.length} collapsed)`);
      return;
    }
    for (const child of node.children) {
      walk(child, depth + 1);
    }
  };
  walk(view.root, 0);
  return lines.join("\n");
}
