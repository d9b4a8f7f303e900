"""Search for a reference configuration whose measured error trends are
monotone at n in {4,8,12}. Throwaway design tool."""
import math, sys, time
import numpy as np
from gwht.prob import Alphabet, JointPmf, CondPmf, compose, marginalize, entropy
from gwht.exponents import RateVector, check_rate_region, check_tilde_region, check_binning_conditions
from gwht.protocol import ProtocolConfig, estimate_errors

X=Alphabet(2,"x"); Z1=Alphabet(2,"z1"); Z2=Alphabet(2,"z2"); S1=Alphabet(2,"s1"); S2=Alphabet(2,"s2")
Y0=Alphabet(2,"y0"); Y1=Alphabet(2,"y1"); Y2=Alphabet(2,"y2")

def source_joint(p_rows, es):
    t = np.zeros((2,2,2,2,2))
    for x in range(2):
        for z1 in range(2):
            for z2 in range(2):
                for s1 in range(2):
                    for s2 in range(2):
                        t[x,z1,z2,s1,s2] = 0.5*p_rows[x][z1]*p_rows[x][z2] \
                            *(es if s1!=x else 1-es)*(es if s2!=x else 1-es)
    return JointPmf((X,Z1,Z2,S1,S2), t)

def alt_joint(q_rows):
    t = np.zeros((2,2,2))
    for x in range(2):
        for z1 in range(2):
            for z2 in range(2):
                t[x,z1,z2] = 0.5*q_rows[x][z1]*q_rows[x][z2]
    return JointPmf((X,Z1,Z2), t)

def product_chan(e0,e1,e2):
    t = np.zeros((2,2,2,2))
    for x in range(2):
        for a in range(2):
            for b in range(2):
                for c in range(2):
                    t[x,a,b,c]=(e0 if a!=x else 1-e0)*(e1 if b!=x else 1-e1)*(e2 if c!=x else 1-e2)
    return CondPmf((X,),(Y0,Y1,Y2),t)

def branch_div(p_rows,q_rows):
    d=0.0
    for x in range(2):
        for z in range(2):
            qv,pv = 0.5*q_rows[x][z], 0.5*p_rows[x][z]
            if qv>0: d += qv*math.log2(qv/pv)
    return d

ez_p = float(sys.argv[2]) if len(sys.argv)>2 else 0.45
g = float(sys.argv[1]) if len(sys.argv)>1 else 0.17
p_rows=[[1-ez_p,ez_p],[ez_p,1-ez_p]]
q_rows=[[1-ez_p-g,ez_p+g],[ez_p-g,1-ez_p+g]]
print("branch D(q||p) =", round(branch_div(p_rows,q_rows),4))
es=0.25
src=source_joint(p_rows,es); alt=alt_joint(q_rows)
p_xzz = marginalize(src, ["x","z1","z2"])

results=[]
for e0,e1 in [(0.1,0.2),(0.15,0.25),(0.05,0.15)]:
    chan=product_chan(e0,e1,e1)
    joint = compose(p_xzz, chan)
    h0 = max(entropy(joint,["y0"],["y1","z1"]), entropy(joint,["y0"],["y2","z2"]))
    h1 = entropy(joint,["y1"],["y0","z1"])
    hp = max(entropy(joint,["y0","y1"],["z1"]), entropy(joint,["y0","y2"],["z2"]))
    for margin_r in (0.08, 0.2):
        rt = 0.1
        r0 = h0 + margin_r - rt; r1 = h1 + margin_r - rt
        if r0 + r1 + 2*rt < hp + margin_r:
            bump = (hp + margin_r - (r0+r1+2*rt))/2
            r0 += bump; r1 += bump
        rates = RateVector(round(r0,3), round(r1,3), round(r1,3), rt, rt, rt)
        rows = check_rate_region(rates,p_xzz,chan)+check_tilde_region(rates,p_xzz,chan) \
             + check_binning_conditions(rates,p_xzz,chan,1)+check_binning_conditions(rates,p_xzz,chan,2)
        if not all(r_.satisfied for r_ in rows):
            print(f"e0={e0} e1={e1} m={margin_r}: region FAIL", [r_.name for r_ in rows if not r_.satisfied])
            continue
        for c in (0.3,0.38,0.46,0.55):
            args=dict(source=src,alt=alt,chan=chan,rates=rates,delta_prime_c=c)
            t0=time.time()
            reps={n: estimate_errors(ProtocolConfig(n=n,seed=20240809,**args), trials=1200) for n in (4,8,12)}
            a={j:[reps[n].alpha[j] for n in (4,8,12)] for j in (1,2)}
            b={j:[reps[n].beta[j] for n in (4,8,12)] for j in (1,2)}
            ok = dict(
                amono=all(a[j][0]>a[j][1]>a[j][2] for j in (1,2)),
                asmall=all(a[j][2]<0.5 for j in (1,2)),
                bmono=all(b[j][0]>b[j][1]>b[j][2] for j in (1,2)))
            mm=min(min(a[j][0]-a[j][1],a[j][1]-a[j][2],b[j][0]-b[j][1],b[j][1]-b[j][2]) for j in (1,2))
            tag=f"e0={e0} e1={e1} r0={rates.r0} r1={rates.r1} rt={rt} c={c}"
            print(f"{tag}: {ok} m={mm:.3f} a1={[round(v,3) for v in a[1]]} b1={[round(v,3) for v in b[1]]} ({time.time()-t0:.0f}s)")
            results.append((ok,mm,tag))

good=[r for r in results if all(r[0].values())]
print("\nPASSING:",len(good))
for ok,mm,tag in sorted(good,key=lambda r:-r[1])[:8]:
    print(f"  m={mm:.3f}  {tag}")
