//! A tiny structured imperative IR and its lowering to per-procedure flow
//! graphs. Structured control flow (sequence / if / while) keeps the
//! lowered CFGs at constant treewidth, which is what the query engine's
//! guarantees assume.

pub type VarId = usize;

#[derive(Clone, Debug)]
pub enum Stmt {
    /// Declare locals without initializing them.
    Decl(Vec<VarId>),
    /// `x = e(uses…)`.
    Assign(VarId, Vec<VarId>),
    /// Read the listed variables.
    Use(Vec<VarId>),
    /// Call a procedure, passing caller variables positionally; `true`
    /// marks a by-reference argument.
    Call { callee: usize, args: Vec<(VarId, bool)> },
    If(Vec<Stmt>, Vec<Stmt>),
    While(Vec<Stmt>),
}

#[derive(Clone, Debug)]
pub struct MiniProc {
    pub name: String,
    /// Parameters are the first variables (param i = var i); `true` marks
    /// by-reference.
    pub params: Vec<bool>,
    pub nvars: usize,
    pub body: Vec<Stmt>,
}

#[derive(Clone, Debug)]
pub struct MiniProgram {
    pub procs: Vec<MiniProc>,
}

// ---------------------------------------------------------------------------
// Lowered CFG

/// What happens at a vertex; the transfer of a vertex's statement is
/// attached to its outgoing intraprocedural edges.
#[derive(Clone, Debug)]
pub enum NodeKind {
    Nop,
    Decl(Vec<VarId>),
    Assign(VarId, Vec<VarId>),
    Use(Vec<VarId>),
    /// Index into `Cfg::calls`.
    Call(usize),
    /// Return site of the call with this index.
    Ret(usize),
}

#[derive(Clone, Debug)]
pub struct CfgCall {
    pub call: usize,
    pub ret: usize,
    pub callee: usize,
    pub args: Vec<(VarId, bool)>,
}

#[derive(Clone, Debug)]
pub struct Cfg {
    pub name: String,
    pub params: Vec<bool>,
    pub nvars: usize,
    pub vertex_names: Vec<String>,
    pub start: usize,
    pub exit: usize,
    /// Intraprocedural edges, including one call-to-return edge per call.
    pub edges: Vec<(usize, usize)>,
    pub kind: Vec<NodeKind>,
    pub calls: Vec<CfgCall>,
}

impl Cfg {
    fn add(&mut self, kind: NodeKind) -> usize {
        let i = self.kind.len();
        self.vertex_names.push(format!("{}_n{}", self.name, i));
        self.kind.push(kind);
        i
    }
}

/// Lowers a sequence of statements; `entry` is the vertex whose out-edge
/// leads into the sequence. Returns the vertex that falls through out of
/// the sequence.
fn lower_seq(cfg: &mut Cfg, body: &[Stmt], mut cur: usize) -> usize {
    for s in body {
        match s {
            Stmt::Decl(xs) => {
                let v = cfg.add(NodeKind::Decl(xs.clone()));
                cfg.edges.push((cur, v));
                cur = v;
            }
            Stmt::Assign(x, uses) => {
                let v = cfg.add(NodeKind::Assign(*x, uses.clone()));
                cfg.edges.push((cur, v));
                cur = v;
            }
            Stmt::Use(xs) => {
                let v = cfg.add(NodeKind::Use(xs.clone()));
                cfg.edges.push((cur, v));
                cur = v;
            }
            Stmt::Call { callee, args } => {
                let ci = cfg.calls.len();
                let c = cfg.add(NodeKind::Call(ci));
                let r = cfg.add(NodeKind::Ret(ci));
                cfg.edges.push((cur, c));
                cfg.edges.push((c, r));
                cfg.calls.push(CfgCall { call: c, ret: r, callee: *callee, args: args.clone() });
                cur = r;
            }
            Stmt::If(a, b) => {
                let branch = cfg.add(NodeKind::Nop);
                cfg.edges.push((cur, branch));
                let ea = lower_seq(cfg, a, branch);
                let eb = lower_seq(cfg, b, branch);
                let join = cfg.add(NodeKind::Nop);
                cfg.edges.push((ea, join));
                if eb != ea {
                    cfg.edges.push((eb, join));
                } else {
                    // Both arms empty: branch is the only predecessor.
                }
                cur = join;
            }
            Stmt::While(body) => {
                let head = cfg.add(NodeKind::Nop);
                cfg.edges.push((cur, head));
                let end = lower_seq(cfg, body, head);
                if end != head {
                    cfg.edges.push((end, head));
                }
                let after = cfg.add(NodeKind::Nop);
                cfg.edges.push((head, after));
                cur = after;
            }
        }
    }
    cur
}

pub fn lower(prog: &MiniProgram) -> Vec<Cfg> {
    prog.procs
        .iter()
        .map(|p| {
            let mut cfg = Cfg {
                name: p.name.clone(),
                params: p.params.clone(),
                nvars: p.nvars,
                vertex_names: Vec::new(),
                start: 0,
                exit: 0,
                edges: Vec::new(),
                kind: Vec::new(),
                calls: Vec::new(),
            };
            let start = cfg.add(NodeKind::Nop);
            cfg.start = start;
            let last = lower_seq(&mut cfg, &p.body, start);
            let exit = cfg.add(NodeKind::Nop);
            cfg.edges.push((last, exit));
            cfg.exit = exit;
            cfg
        })
        .collect()
}
