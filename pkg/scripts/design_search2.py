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

def product_chan(e0,e1):
    t = np.zeros((2,2,2,2))
    for x in range(2):
        for a in range(2):
            for b in range(2):
                for c in range(2):
                    t[x,a,b,c]=(e0 if a!=x else 1-e0)*(e1 if b!=x else 1-e1)*(e1 if c!=x else 1-e1)
    return CondPmf((X,),(Y0,Y1,Y2),t)

def branch_div(p_rows,q_rows):
    d=0.0
    for x in range(2):
        for z in range(2):
            qv,pv=0.5*q_rows[x][z],0.5*p_rows[x][z]
            if qv>0: d+=qv*math.log2(qv/pv)
    return d

es=0.25
results=[]
for ez in (0.5, 0.45):
    p_rows=[[1-ez,ez],[ez,1-ez]]
    for g in (0.17, 0.19, 0.21):
        q_rows=[[1-ez-g,ez+g],[ez-g,1-ez+g]]
        D=branch_div(p_rows,q_rows)
        src=source_joint(p_rows,es); alt=alt_joint(q_rows)
        p_xzz=marginalize(src,["x","z1","z2"])
        for e0 in (0.1, 0.2):
            chan=product_chan(e0, e0+0.1)
            joint=compose(p_xzz,chan)
            h0=max(entropy(joint,["y0"],["y1","z1"]),entropy(joint,["y0"],["y2","z2"]))
            h1=entropy(joint,["y1"],["y0","z1"])
            hp=max(entropy(joint,["y0","y1"],["z1"]),entropy(joint,["y0","y2"],["z2"]))
            rt=0.1; m=0.15
            r0=h0+m-rt; r1=h1+m-rt
            if r0+r1+2*rt < hp+m:
                bump=(hp+m-(r0+r1+2*rt))/2; r0+=bump; r1+=bump
            rates=RateVector(round(r0,3),round(r1,3),round(r1,3),rt,rt,rt)
            rows=check_rate_region(rates,p_xzz,chan)+check_tilde_region(rates,p_xzz,chan) \
               +check_binning_conditions(rates,p_xzz,chan,1)+check_binning_conditions(rates,p_xzz,chan,2)
            if not all(r_.satisfied for r_ in rows): 
                print("region fail", ez,g,e0); continue
            for c in (0.3,0.35,0.4,0.45):
                args=dict(source=src,alt=alt,chan=chan,rates=rates,delta_prime_c=c)
                reps={n: estimate_errors(ProtocolConfig(n=n,seed=11,**args),trials=1500) for n in (4,8,12)}
                a={j:[reps[n].alpha[j] for n in (4,8,12)] for j in (1,2)}
                b={j:[reps[n].beta[j] for n in (4,8,12)] for j in (1,2)}
                ok=dict(am=all(a[j][0]>a[j][1]>a[j][2] for j in (1,2)),
                        asz=all(a[j][2]<0.5 for j in (1,2)),
                        bm=all(b[j][0]>b[j][1]>b[j][2] for j in (1,2)))
                mm=min(min(a[j][0]-a[j][1],a[j][1]-a[j][2],b[j][0]-b[j][1],b[j][1]-b[j][2]) for j in (1,2))
                npass=sum(ok.values())
                tag=f"ez={ez} g={g} D={D:.3f} e0={e0} r0={rates.r0} r1={rates.r1} c={c}"
                print(f"{'*' if npass==3 else ' '}{npass} {tag} m={mm:.3f} a1={[round(v,2) for v in a[1]]} b1={[round(v,2) for v in b[1]]}")
                results.append((npass,mm,tag))
print("\nbest:")
for npass,mm,tag in sorted(results,key=lambda r:(-r[0],-r[1]))[:10]:
    print(f"  {npass} m={mm:.3f} {tag}")
