//! Arena of transition nodes threaded through two kinds of treaps.
//!
//! * The global treap is implicit (keyed by position) and keeps parent
//!   pointers so the rank of any node is a walk to the root.
//! * Each vertex owns a treap over its own transitions, ordered by global
//!   rank. It has no keys of its own: comparisons ask the global treap for
//!   the rank of a node, which gives `O(log^2 T)` searches.
//!
//! Both treaps share one random priority per node.

pub(crate) const NIL: u32 = u32::MAX;
const DEAD: u32 = u32::MAX - 1;

#[derive(Debug, Clone)]
pub(crate) struct Node {
    // global treap
    l: u32,
    r: u32,
    p: u32,
    size: u32,
    // per-vertex treap
    vl: u32,
    vr: u32,
    vsize: u32,
    prio: u32,
    pub slot: u32,
    pub spin: u32,
}

#[derive(Debug, Clone)]
pub(crate) struct Arena {
    nodes: Vec<Node>,
    free: Vec<u32>,
    pub root: u32,
    counter: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Arena {
    pub fn new() -> Self {
        Self {
            nodes: Vec::new(),
            free: Vec::new(),
            root: NIL,
            counter: 0,
        }
    }

    pub fn live_nodes(&self) -> usize {
        self.nodes.len() - self.free.len()
    }

    pub fn len(&self) -> usize {
        self.size(self.root) as usize
    }

    pub fn node(&self, x: u32) -> &Node {
        &self.nodes[x as usize]
    }

    pub fn set_spin(&mut self, x: u32, spin: u32) {
        self.nodes[x as usize].spin = spin;
    }

    pub fn alloc(&mut self, slot: u32, spin: u32) -> u32 {
        self.counter += 1;
        let node = Node {
            l: NIL,
            r: NIL,
            p: NIL,
            size: 1,
            vl: NIL,
            vr: NIL,
            vsize: 1,
            prio: (splitmix64(self.counter) >> 32) as u32,
            slot,
            spin,
        };
        if let Some(i) = self.free.pop() {
            self.nodes[i as usize] = node;
            i
        } else {
            let i = self.nodes.len() as u32;
            assert!(i < DEAD, "execution log exceeds u32 node capacity");
            self.nodes.push(node);
            i
        }
    }

    fn release(&mut self, x: u32) {
        self.free.push(x);
    }

    #[inline]
    fn size(&self, x: u32) -> u32 {
        if x == NIL {
            0
        } else {
            self.nodes[x as usize].size
        }
    }

    #[inline]
    fn vsize(&self, x: u32) -> u32 {
        if x == NIL {
            0
        } else {
            self.nodes[x as usize].vsize
        }
    }

    #[inline]
    fn pull(&mut self, x: u32) {
        let (l, r) = {
            let n = &self.nodes[x as usize];
            (n.l, n.r)
        };
        self.nodes[x as usize].size = 1 + self.size(l) + self.size(r);
        if l != NIL {
            self.nodes[l as usize].p = x;
        }
        if r != NIL {
            self.nodes[r as usize].p = x;
        }
    }

    #[inline]
    fn vpull(&mut self, x: u32) {
        let n = &self.nodes[x as usize];
        let s = 1 + self.vsize(n.vl) + self.vsize(n.vr);
        self.nodes[x as usize].vsize = s;
    }

    // ---- global treap ----

    /// First `k` nodes of `x` go left.
    fn split(&mut self, x: u32, k: u32) -> (u32, u32) {
        if x == NIL {
            return (NIL, NIL);
        }
        let l = self.nodes[x as usize].l;
        let ls = self.size(l);
        if k <= ls {
            let (a, b) = self.split(l, k);
            self.nodes[x as usize].l = b;
            self.pull(x);
            if a != NIL {
                self.nodes[a as usize].p = NIL;
            }
            (a, x)
        } else {
            let r = self.nodes[x as usize].r;
            let (a, b) = self.split(r, k - ls - 1);
            self.nodes[x as usize].r = a;
            self.pull(x);
            if b != NIL {
                self.nodes[b as usize].p = NIL;
            }
            (x, b)
        }
    }

    fn merge(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        if self.nodes[a as usize].prio > self.nodes[b as usize].prio {
            let ar = self.nodes[a as usize].r;
            let m = self.merge(ar, b);
            self.nodes[a as usize].r = m;
            self.pull(a);
            a
        } else {
            let bl = self.nodes[b as usize].l;
            let m = self.merge(a, bl);
            self.nodes[b as usize].l = m;
            self.pull(b);
            b
        }
    }

    fn set_root(&mut self, x: u32) {
        self.root = x;
        if x != NIL {
            self.nodes[x as usize].p = NIL;
        }
    }

    /// Node at 1-based rank `t`.
    pub fn kth(&self, mut t: u32) -> u32 {
        let mut x = self.root;
        debug_assert!(t >= 1 && t <= self.size(x));
        loop {
            let n = &self.nodes[x as usize];
            let ls = self.size(n.l);
            if t <= ls {
                x = n.l;
            } else if t == ls + 1 {
                return x;
            } else {
                t -= ls + 1;
                x = n.r;
            }
        }
    }

    /// 1-based rank of node `x`.
    #[inline]
    pub fn rank(&self, mut x: u32) -> u32 {
        let mut r = self.size(self.nodes[x as usize].l) + 1;
        loop {
            let p = self.nodes[x as usize].p;
            if p == NIL {
                return r;
            }
            let pn = &self.nodes[p as usize];
            if pn.r == x {
                r += self.size(pn.l) + 1;
            }
            x = p;
        }
    }

    /// Places the detached node `x` at rank `t`.
    pub fn global_insert(&mut self, t: u32, x: u32) {
        let (a, b) = self.split(self.root, t - 1);
        let ax = self.merge(a, x);
        let root = self.merge(ax, b);
        self.set_root(root);
    }

    /// Unlinks `x` from the global treap.
    pub fn global_detach(&mut self, x: u32) {
        let (l, r, p) = {
            let n = &self.nodes[x as usize];
            (n.l, n.r, n.p)
        };
        if l != NIL {
            self.nodes[l as usize].p = NIL;
        }
        if r != NIL {
            self.nodes[r as usize].p = NIL;
        }
        let m = self.merge(l, r);
        if p == NIL {
            self.set_root(m);
        } else {
            if self.nodes[p as usize].l == x {
                self.nodes[p as usize].l = m;
            } else {
                self.nodes[p as usize].r = m;
            }
            let mut y = p;
            while y != NIL {
                self.pull(y);
                y = self.nodes[y as usize].p;
            }
        }
        let n = &mut self.nodes[x as usize];
        n.l = NIL;
        n.r = NIL;
        n.p = NIL;
        n.size = 1;
    }

    /// Nodes in rank order.
    pub fn in_order(&self, root: u32, out: &mut Vec<u32>) {
        let mut stack = Vec::new();
        let mut x = root;
        while x != NIL || !stack.is_empty() {
            while x != NIL {
                stack.push(x);
                x = self.nodes[x as usize].l;
            }
            let y = stack.pop().expect("non-empty");
            out.push(y);
            x = self.nodes[y as usize].r;
        }
    }

    // ---- per-vertex treaps ----

    /// Splits a vertex treap into nodes of rank `<= m` and the rest.
    pub fn vsplit_le(&mut self, x: u32, m: u32) -> (u32, u32) {
        if x == NIL {
            return (NIL, NIL);
        }
        if self.rank(x) <= m {
            let r = self.nodes[x as usize].vr;
            let (a, b) = self.vsplit_le(r, m);
            self.nodes[x as usize].vr = a;
            self.vpull(x);
            (x, b)
        } else {
            let l = self.nodes[x as usize].vl;
            let (a, b) = self.vsplit_le(l, m);
            self.nodes[x as usize].vl = b;
            self.vpull(x);
            (a, x)
        }
    }

    /// Splits off the suffix of nodes marked dead.
    fn vsplit_live(&mut self, x: u32) -> (u32, u32) {
        if x == NIL {
            return (NIL, NIL);
        }
        if self.nodes[x as usize].p != DEAD {
            let r = self.nodes[x as usize].vr;
            let (a, b) = self.vsplit_live(r);
            self.nodes[x as usize].vr = a;
            self.vpull(x);
            (x, b)
        } else {
            let l = self.nodes[x as usize].vl;
            let (a, b) = self.vsplit_live(l);
            self.nodes[x as usize].vl = b;
            self.vpull(x);
            (a, x)
        }
    }

    pub fn vmerge(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        if self.nodes[a as usize].prio > self.nodes[b as usize].prio {
            let ar = self.nodes[a as usize].vr;
            let m = self.vmerge(ar, b);
            self.nodes[a as usize].vr = m;
            self.vpull(a);
            a
        } else {
            let bl = self.nodes[b as usize].vl;
            let m = self.vmerge(a, bl);
            self.nodes[b as usize].vl = m;
            self.vpull(b);
            b
        }
    }

    pub fn vlen(&self, root: u32) -> usize {
        self.vsize(root) as usize
    }

    /// Latest node of a vertex treap with rank `<= t`, with its rank.
    #[inline]
    pub fn vpred(&self, root: u32, t: u32) -> Option<(u32, u32)> {
        let mut x = root;
        let mut best = None;
        while x != NIL {
            let r = self.rank(x);
            let n = &self.nodes[x as usize];
            if r <= t {
                best = Some((x, r));
                x = n.vr;
            } else {
                x = n.vl;
            }
        }
        best
    }

    /// Earliest node of a vertex treap with rank `> t`, with its rank.
    #[inline]
    pub fn vsucc(&self, root: u32, t: u32) -> Option<(u32, u32)> {
        let mut x = root;
        let mut best = None;
        while x != NIL {
            let r = self.rank(x);
            let n = &self.nodes[x as usize];
            if r > t {
                best = Some((x, r));
                x = n.vl;
            } else {
                x = n.vr;
            }
        }
        best
    }

    /// `j`-th (0-based) node of a vertex treap.
    pub fn vkth(&self, root: u32, mut j: u32) -> u32 {
        let mut x = root;
        loop {
            let n = &self.nodes[x as usize];
            let ls = self.vsize(n.vl);
            if j < ls {
                x = n.vl;
            } else if j == ls {
                return x;
            } else {
                j -= ls + 1;
                x = n.vr;
            }
        }
    }

    pub fn vlast(&self, root: u32) -> Option<u32> {
        if root == NIL {
            return None;
        }
        let mut x = root;
        while self.nodes[x as usize].vr != NIL {
            x = self.nodes[x as usize].vr;
        }
        Some(x)
    }

    pub fn vin_order(&self, root: u32, out: &mut Vec<u32>) {
        let mut stack = Vec::new();
        let mut x = root;
        while x != NIL || !stack.is_empty() {
            while x != NIL {
                stack.push(x);
                x = self.nodes[x as usize].vl;
            }
            let y = stack.pop().expect("non-empty");
            out.push(y);
            x = self.nodes[y as usize].vr;
        }
    }

    // ---- bulk operations ----

    /// Builds a global treap over `seq` (in order) in linear time.
    pub fn build_global(&mut self, seq: &[u32]) -> u32 {
        let mut stack: Vec<u32> = Vec::with_capacity(64);
        for &x in seq {
            let mut last = NIL;
            while let Some(&top) = stack.last() {
                if self.nodes[top as usize].prio < self.nodes[x as usize].prio {
                    last = stack.pop().expect("non-empty");
                } else {
                    break;
                }
            }
            self.nodes[x as usize].l = last;
            if let Some(&top) = stack.last() {
                self.nodes[top as usize].r = x;
            }
            stack.push(x);
        }
        let root = stack.first().copied().unwrap_or(NIL);
        self.fix_sizes_global(root);
        if root != NIL {
            self.nodes[root as usize].p = NIL;
        }
        root
    }

    fn fix_sizes_global(&mut self, root: u32) {
        let mut order = Vec::new();
        self.post_order(root, false, &mut order);
        for x in order {
            self.pull(x);
        }
    }

    /// Builds a vertex treap over `seq` (in rank order) in linear time.
    pub fn build_vertex(&mut self, seq: &[u32]) -> u32 {
        let mut stack: Vec<u32> = Vec::with_capacity(64);
        for &x in seq {
            let mut last = NIL;
            while let Some(&top) = stack.last() {
                if self.nodes[top as usize].prio < self.nodes[x as usize].prio {
                    last = stack.pop().expect("non-empty");
                } else {
                    break;
                }
            }
            self.nodes[x as usize].vl = last;
            if let Some(&top) = stack.last() {
                self.nodes[top as usize].vr = x;
            }
            stack.push(x);
        }
        let root = stack.first().copied().unwrap_or(NIL);
        let mut order = Vec::new();
        self.post_order(root, true, &mut order);
        for x in order {
            self.vpull(x);
        }
        root
    }

    fn post_order(&self, root: u32, vertex: bool, out: &mut Vec<u32>) {
        if root == NIL {
            return;
        }
        // Reverse of a (node, right, left) preorder is a postorder.
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            out.push(x);
            let n = &self.nodes[x as usize];
            let (l, r) = if vertex { (n.vl, n.vr) } else { (n.l, n.r) };
            if l != NIL {
                stack.push(l);
            }
            if r != NIL {
                stack.push(r);
            }
        }
        out.reverse();
    }

    pub fn append_global(&mut self, tree: u32) {
        let root = self.merge(self.root, tree);
        self.set_root(root);
    }

    /// Cuts every node after rank `m` out of the global treap and marks it
    /// dead; returns the removed nodes in rank order.
    pub fn cut_suffix(&mut self, m: u32) -> Vec<u32> {
        let (a, b) = self.split(self.root, m);
        self.set_root(a);
        let mut out = Vec::new();
        self.in_order(b, &mut out);
        for &x in &out {
            self.nodes[x as usize].p = DEAD;
        }
        out
    }

    /// Drops the dead suffix of a vertex treap and returns the live part.
    pub fn vdrop_dead(&mut self, root: u32) -> u32 {
        self.vsplit_live(root).0
    }

    pub fn free_nodes(&mut self, nodes: &[u32]) {
        for &x in nodes {
            self.release(x);
        }
    }

    pub fn free_node(&mut self, x: u32) {
        self.release(x);
    }
}
