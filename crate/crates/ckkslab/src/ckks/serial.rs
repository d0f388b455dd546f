//! Versioned little-endian binary container for parameters, ciphertexts and
//! switching keys.
//!
//! Layout:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "CKLB"
//! 4       2     format version (u16)
//! 6       1     payload kind (1 params, 2 ciphertext, 3 key, 4 compressed key)
//! 7       32    parameter hash (SHA-256 of the spec and every prime)
//! 39      ...   payload
//! ```
//!
//! Payloads:
//! - params: u32 length, then the spec as JSON.
//! - ciphertext: f64 scale, u32 limb count, u32 degree, then the limbs of a
//!   followed by the limbs of b, each limb as `degree` u64 words, evaluation
//!   form.
//! - key: u8 tag kind (0 relin, 1 galois), u64 galois element, u32 digit
//!   count, then for each digit the full-basis a row and b row.
//! - compressed key: tag as above, 32-byte seed, u32 digit count, then the b
//!   rows.

use super::keys::{CompressedSwitchingKey, KeyTag, SwitchingKey};
use super::{Ciphertext, CkksError, CkksParams, ParamSpec};
use crate::rns::{Rep, RnsBasis, RnsPoly};

pub const MAGIC: &[u8; 4] = b"CKLB";
pub const VERSION: u16 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Kind {
    Params = 1,
    Ciphertext = 2,
    Key = 3,
    CompressedKey = 4,
}

fn header(out: &mut Vec<u8>, kind: Kind, hash: &[u8; 32]) {
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(kind as u8);
    out.extend_from_slice(hash);
}

fn put_poly(out: &mut Vec<u8>, p: &RnsPoly) {
    for &w in p.data() {
        out.extend_from_slice(&w.to_le_bytes());
    }
}

fn put_tag(out: &mut Vec<u8>, tag: KeyTag) {
    match tag {
        KeyTag::Relin => out.push(0),
        KeyTag::Galois(_) => out.push(1),
    }
    out.extend_from_slice(&tag.code().to_le_bytes());
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

fn bad(msg: &str) -> CkksError {
    CkksError::Format(msg.to_string())
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8], CkksError> {
        let end = self.pos.checked_add(k).filter(|&e| e <= self.buf.len()).ok_or_else(|| bad("truncated"))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, CkksError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, CkksError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64, CkksError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64, CkksError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn poly(&mut self, basis: &RnsBasis, n: usize) -> Result<RnsPoly, CkksError> {
        let mut data = Vec::with_capacity(basis.len() * n);
        for i in 0..basis.len() {
            let q = basis.modulus(i).value();
            for _ in 0..n {
                let w = self.u64()?;
                if w >= q {
                    return Err(bad("residue out of range"));
                }
                data.push(w);
            }
        }
        Ok(RnsPoly::from_limbs(basis, n, Rep::Eval, data))
    }

    fn tag(&mut self) -> Result<KeyTag, CkksError> {
        let kind = self.u8()?;
        let code = self.u64()?;
        match kind {
            0 => Ok(KeyTag::Relin),
            1 => Ok(KeyTag::Galois(code as usize)),
            _ => Err(bad("unknown key tag")),
        }
    }

    fn finish(&self) -> Result<(), CkksError> {
        if self.pos != self.buf.len() {
            return Err(bad("trailing bytes"));
        }
        Ok(())
    }
}

/// Checks the header and returns the payload reader.
fn open<'a>(buf: &'a [u8], kind: Kind, hash: Option<&[u8; 32]>) -> Result<Reader<'a>, CkksError> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(bad("bad magic"));
    }
    let version = u16::from_le_bytes(r.take(2)?.try_into().expect("2 bytes"));
    if version != VERSION {
        return Err(CkksError::Format(format!("unsupported version {version}")));
    }
    if r.u8()? != kind as u8 {
        return Err(bad("unexpected payload kind"));
    }
    let h = r.take(32)?;
    if let Some(want) = hash {
        if h != want {
            return Err(bad("parameter hash mismatch"));
        }
    }
    Ok(r)
}

pub fn params_to_bytes(p: &CkksParams) -> Vec<u8> {
    let mut out = Vec::new();
    header(&mut out, Kind::Params, &p.hash());
    let json = serde_json::to_vec(p.spec()).expect("spec serializes");
    out.extend_from_slice(&(json.len() as u32).to_le_bytes());
    out.extend_from_slice(&json);
    out
}

pub fn params_from_bytes(buf: &[u8]) -> Result<CkksParams, CkksError> {
    let mut r = open(buf, Kind::Params, None)?;
    let stored: [u8; 32] = buf[7..39].try_into().expect("32 bytes");
    let len = r.u32()? as usize;
    let spec: ParamSpec = serde_json::from_slice(r.take(len)?).map_err(|e| CkksError::Format(e.to_string()))?;
    r.finish()?;
    let p = CkksParams::new(spec)?;
    if p.hash() != stored {
        return Err(bad("parameter hash mismatch"));
    }
    Ok(p)
}

pub fn ciphertext_to_bytes(p: &CkksParams, ct: &Ciphertext) -> Vec<u8> {
    let mut out = Vec::with_capacity(64 + 8 * ct.words());
    header(&mut out, Kind::Ciphertext, &p.hash());
    out.extend_from_slice(&ct.scale.to_le_bytes());
    out.extend_from_slice(&(ct.a.limb_count() as u32).to_le_bytes());
    out.extend_from_slice(&(ct.a.degree() as u32).to_le_bytes());
    put_poly(&mut out, &ct.a);
    put_poly(&mut out, &ct.b);
    out
}

pub fn ciphertext_from_bytes(p: &CkksParams, buf: &[u8]) -> Result<Ciphertext, CkksError> {
    let mut r = open(buf, Kind::Ciphertext, Some(&p.hash()))?;
    let scale = r.f64()?;
    let limbs = r.u32()? as usize;
    let n = r.u32()? as usize;
    if limbs == 0 || limbs > p.max_level() + 1 || n != p.degree() {
        return Err(bad("shape does not match the parameters"));
    }
    let basis = p.level_basis(limbs - 1);
    let a = r.poly(&basis, n)?;
    let b = r.poly(&basis, n)?;
    r.finish()?;
    Ok(Ciphertext { a, b, scale })
}

pub fn key_to_bytes(p: &CkksParams, k: &SwitchingKey) -> Vec<u8> {
    let mut out = Vec::new();
    header(&mut out, Kind::Key, &p.hash());
    put_tag(&mut out, k.tag);
    out.extend_from_slice(&(k.a.len() as u32).to_le_bytes());
    for (a, b) in k.a.iter().zip(&k.b) {
        put_poly(&mut out, a);
        put_poly(&mut out, b);
    }
    out
}

pub fn key_from_bytes(p: &CkksParams, buf: &[u8]) -> Result<SwitchingKey, CkksError> {
    let mut r = open(buf, Kind::Key, Some(&p.hash()))?;
    let tag = r.tag()?;
    let digits = r.u32()? as usize;
    if digits != p.dnum() {
        return Err(bad("digit count does not match the parameters"));
    }
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for _ in 0..digits {
        a.push(r.poly(p.full(), p.degree())?);
        b.push(r.poly(p.full(), p.degree())?);
    }
    r.finish()?;
    Ok(SwitchingKey { tag, a, b })
}

pub fn compressed_key_to_bytes(p: &CkksParams, k: &CompressedSwitchingKey) -> Vec<u8> {
    let mut out = Vec::new();
    header(&mut out, Kind::CompressedKey, &p.hash());
    put_tag(&mut out, k.tag);
    out.extend_from_slice(&k.seed);
    out.extend_from_slice(&(k.b.len() as u32).to_le_bytes());
    for b in &k.b {
        put_poly(&mut out, b);
    }
    out
}

pub fn compressed_key_from_bytes(p: &CkksParams, buf: &[u8]) -> Result<CompressedSwitchingKey, CkksError> {
    let mut r = open(buf, Kind::CompressedKey, Some(&p.hash()))?;
    let tag = r.tag()?;
    let seed: [u8; 32] = r.take(32)?.try_into().expect("32 bytes");
    let digits = r.u32()? as usize;
    if digits != p.dnum() {
        return Err(bad("digit count does not match the parameters"));
    }
    let b = (0..digits).map(|_| r.poly(p.full(), p.degree())).collect::<Result<_, _>>()?;
    r.finish()?;
    Ok(CompressedSwitchingKey { tag, seed, b })
}
